#include "epp/phantom.hpp"

#include <cmath>

namespace epp {

Image shapes_phantom(Eigen::Index m) {
    if (m < 8) throw InvalidParameter("phantom needs m >= 8");
    Image img(m, 0.1);
    const double s = double(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        for (Eigen::Index r = 0; r < m; ++r) {
            // Normalized pixel-center coordinates in [0, 1).
            const double y = (double(r) + 0.5) / s;
            const double x = (double(c) + 0.5) / s;
            double v = 0.1;
            if (x > 0.08 && x < 0.42 && y > 0.10 && y < 0.38) v = 0.75;
            if (x > 0.16 && x < 0.30 && y > 0.18 && y < 0.30) v = 0.35;
            const double d1 = std::hypot(x - 0.70, y - 0.26);
            if (d1 < 0.17) v = 0.9;
            if (d1 < 0.08) v = 0.55;
            const double d2 = std::hypot(x - 0.28, y - 0.70);
            if (d2 < 0.18 && d2 > 0.11) v = 0.65;
            if (d2 < 0.05) v = 1.0;
            // Triangle with vertices (0.55,0.88), (0.92,0.88), (0.74,0.52).
            const bool below_top = y < 0.88;
            const bool right_of_left = (y - 0.88) * (0.74 - 0.55) - (x - 0.55) * (0.52 - 0.88) <= 0.0;
            const bool left_of_right = (y - 0.88) * (0.74 - 0.92) - (x - 0.92) * (0.52 - 0.88) >= 0.0;
            if (below_top && right_of_left && left_of_right) v = 0.45;
            for (int bar = 0; bar < 4; ++bar) {
                const double x0 = 0.05 + 0.03 * bar;
                if (x > x0 && x < x0 + 0.012 && y > 0.45 && y < 0.95) v = 0.8;
            }
            img(r, c) = v;
        }
    }
    return img;
}

}  // namespace epp
