#include "roughwalk/linalg.hpp"

#include <algorithm>

namespace rw {

// Closed-form symmetric eigensolve for d <= 3 (trigonometric method for 3x3).
std::array<double, kMaxDim> symmetric_eigenvalues(const Mat& m) {
    std::array<double, kMaxDim> ev{};
    if (m.d == 1) {
        ev[0] = m.a[0];
        return ev;
    }
    if (m.d == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        ev[0] = tr / 2 - disc;
        ev[1] = tr / 2 + disc;
        return ev;
    }
    const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
    Mat b = m;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    double p2 = 0;
    for (int i = 0; i < 9; ++i) p2 += b.a[i] * b.a[i];
    const double p = std::sqrt(p2 / 6.0);
    if (p < 1e-300) {
        ev.fill(q);
        return ev;
    }
    for (int i = 0; i < 9; ++i) b.a[i] /= p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    ev[2] = q + 2 * p * std::cos(phi);
    ev[0] = q + 2 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    ev[1] = 3 * q - ev[0] - ev[2];
    std::sort(ev.begin(), ev.begin() + 3);
    return ev;
}

}  // namespace rw
