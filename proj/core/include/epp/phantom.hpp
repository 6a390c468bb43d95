#pragma once

#include "epp/image.hpp"

namespace epp {

/// Piecewise-constant test image with rectangles, disks, a ring, a
/// triangle and thin bars on a dark background. Intensities lie in [0, 1].
/// Geometry scales with m; the result is deterministic.
Image shapes_phantom(Eigen::Index m);

}  // namespace epp
