#include "kgsym/lambert.hpp"

#include <cmath>

namespace kgsym {

double lambert_w(double x) {
    const double branch_point = -std::exp(-1.0);
    if (x < branch_point) {
        // Tolerate rounding right at the branch point.
        if (x > branch_point - 1e-12) x = branch_point;
        else throw std::domain_error("lambert_w: argument below -1/e");
    }
    if (x == 0.0) return 0.0;

    // Initial guess.
    double w;
    if (x > std::exp(1.0)) {
        double l1 = std::log(x);
        double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    } else if (x < -0.25) {
        // Series around the branch point.
        double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
        w = -1.0 + p - p * p / 3.0;
    } else {
        w = x * (1.0 - x);
    }

    for (int i = 0; i < 60; ++i) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double wp1 = w + 1.0;
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        double step = f / denom;
        w -= step;
        if (std::abs(f) <= 1e-15 * std::fmax(1.0, std::abs(x)) || std::abs(step) < 1e-17)
            break;
    }
    return w;
}

}  // namespace kgsym
