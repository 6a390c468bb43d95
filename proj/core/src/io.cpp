#include "epp/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace epp {

namespace {

static_assert(std::endian::native == std::endian::little, "EPPF I/O assumes a little-endian host");

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PgmCursor {
public:
    explicit PgmCursor(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::uint64_t number() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw FormatError("malformed PGM header");
        std::uint64_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + std::uint64_t(bytes_[pos_++] - '0');
            if (v > (1ULL << 40)) throw FormatError("PGM value out of range");
        }
        return v;
    }

    std::size_t& pos() { return pos_; }

private:
    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 2;
};

Image read_pgm(const std::vector<unsigned char>& bytes, bool binary) {
    PgmCursor cur(bytes);
    const auto width = cur.number();
    const auto height = cur.number();
    const auto maxval = cur.number();
    if (width == 0 || height == 0) throw FormatError("PGM has zero size");
    if (width != height) throw FormatError("only square images are supported");
    if (maxval == 0 || maxval > 65535) throw FormatError("PGM maxval must be in [1, 65535]");
    const auto m = Eigen::Index(width);
    Image img(m);
    const double scale = 1.0 / double(maxval);

    if (binary) {
        // Exactly one whitespace byte separates the header from the raster.
        std::size_t pos = cur.pos();
        if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("malformed PGM header");
        ++pos;
        const std::size_t bpp = maxval < 256 ? 1 : 2;
        if (bytes.size() - pos < std::size_t(m * m) * bpp) throw FormatError("truncated PGM raster");
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                std::uint32_t v = bytes[pos++];
                if (bpp == 2) v = (v << 8) | bytes[pos++];
                if (v > maxval) throw FormatError("PGM sample exceeds maxval");
                img(r, c) = double(v) * scale;
            }
        }
    } else {
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                const auto v = cur.number();
                if (v > maxval) throw FormatError("PGM sample exceeds maxval");
                img(r, c) = double(v) * scale;
            }
        }
    }
    return img;
}

Image read_eppf(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 16) throw FormatError("truncated EPPF header");
    std::uint64_t m = 0;
    std::memcpy(&m, bytes.data() + 8, sizeof m);
    if (m < 1 || m > (1u << 16)) throw FormatError("EPPF side length out of range");
    if (bytes.size() != 16 + m * m * sizeof(double)) throw FormatError("EPPF payload size mismatch");
    Image img{Eigen::Index(m)};
    const unsigned char* p = bytes.data() + 16;
    for (Eigen::Index r = 0; r < Eigen::Index(m); ++r) {
        for (Eigen::Index c = 0; c < Eigen::Index(m); ++c) {
            double v = 0.0;
            std::memcpy(&v, p, sizeof v);
            p += sizeof v;
            img(r, c) = v;
        }
    }
    if (!img.matrix().allFinite()) throw FormatError("EPPF raster contains non-finite values");
    return img;
}

std::uint32_t quantize(double v, std::uint32_t maxval) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return std::uint32_t(std::lround(clamped * double(maxval)));
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kEppfMagic, 8) == 0) return read_eppf(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
        return read_pgm(bytes, bytes[1] == '5');
    }
    throw FormatError("unsupported image format in '" + path.string() + "' (expected PGM P2/P5 or EPPF)");
}

ImageFormat format_for_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return ext == ".pgm" ? ImageFormat::pgm_binary : ImageFormat::eppf;
}

void write_image(const Image& image, const std::filesystem::path& path) {
    write_image(image, path, format_for_path(path));
}

void write_image(const Image& image, const std::filesystem::path& path, ImageFormat format, std::uint32_t maxval) {
    if (maxval == 0 || maxval > 65535) throw InvalidParameter("PGM maxval must be in [1, 65535]");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const Eigen::Index m = image.side();

    switch (format) {
    case ImageFormat::eppf: {
        out.write(kEppfMagic, 8);
        const std::uint64_t side = std::uint64_t(m);
        out.write(reinterpret_cast<const char*>(&side), sizeof side);
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                const double v = image(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
        }
        break;
    }
    case ImageFormat::pgm_binary: {
        out << "P5\n" << m << ' ' << m << '\n' << maxval << '\n';
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                const auto q = quantize(image(r, c), maxval);
                if (maxval > 255) out.put(char((q >> 8) & 0xff));
                out.put(char(q & 0xff));
            }
        }
        break;
    }
    case ImageFormat::pgm_ascii: {
        out << "P2\n" << m << ' ' << m << '\n' << maxval << '\n';
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) out << quantize(image(r, c), maxval) << (c + 1 < m ? ' ' : '\n');
        }
        break;
    }
    }
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace epp
