#include "retromc/special_functions.hpp"

namespace retromc {

double lambert_w0(double x) {
    if (x < 0.0) throw std::domain_error("lambert_w0: argument must be >= 0");
    if (x == 0.0) return 0.0;

    double w;
    if (x < 1.0) {
        // series-flavoured guess, accurate enough near 0
        w = x * (1.0 - x + 1.5 * x * x);
        if (w <= 0.0) w = x / (1.0 + x);
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1 > 1.0 ? l1 : 1.0);
        w = l1 - l2 + (l1 > 1.0 ? l2 / l1 : 0.0);
        if (w <= 0.0) w = l1;
    }

    for (int iter = 0; iter < 60; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::abs(f) <= 1e-13 * std::max(std::abs(x), 1.0)) break;
        const double wp1 = w + 1.0;
        // Halley step
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        double step = f / denom;
        // keep the iterate on the branch w >= 0 for x >= 0
        if (w - step < 0.0) step = w * 0.5;
        w -= step;
    }
    return w;
}

} // namespace retromc
