#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "epp/image.hpp"

namespace epp {

enum class ImageFormat { pgm_ascii, pgm_binary, eppf };

/// EPPF raster: 8-byte magic "EPPF\0\0\0\1", uint64 little-endian side m,
/// then m*m little-endian float64 values in row-major order.
inline constexpr char kEppfMagic[8] = {'E', 'P', 'P', 'F', '\0', '\0', '\0', '\1'};

/// Reads PGM (P2/P5, maxval <= 65535, mapped to [0,1]) or EPPF, detected by
/// the leading bytes. Images must be square.
Image read_image(const std::filesystem::path& path);

/// PGM output clamps to [0,1] and quantizes to `maxval`.
void write_image(const Image& image, const std::filesystem::path& path, ImageFormat format,
                 std::uint32_t maxval = 255);

/// Chooses the format from the extension: .pgm -> binary PGM, anything else -> EPPF.
void write_image(const Image& image, const std::filesystem::path& path);

ImageFormat format_for_path(const std::filesystem::path& path);

}  // namespace epp
