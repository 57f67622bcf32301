#include "retromc/numeric.hpp"

namespace retromc {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth,
                long* budget) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    *budget -= 2;
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    // the floor stops recursion once delta is dominated by evaluation noise
    // (integrands built from large cancelling exponents carry far more than
    // ulp-level relative error); summed over leaves it adds <= ~1e-12 int |f|
    const double noise_floor = 1e-12 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || *budget <= 0 || !std::isfinite(delta) ||
        std::abs(delta) <= std::max(15.0 * tol, noise_floor)) {
        return left + right + delta / 15.0;
    }
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, budget) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, budget);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    long budget = 4'000'000;
    return adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth, &budget);
}

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    GaussHermite gh;
    gh.nodes.resize(n);
    gh.weights.resize(n);

    const double pim4 = 0.751125544464942482; // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        // initial guesses for the roots, largest first
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * gh.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * gh.nodes[1];
        } else {
            z = 2.0 * z - gh.nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        gh.nodes[i] = z;
        gh.nodes[n - 1 - i] = -z;
        gh.weights[i] = 2.0 / (pp * pp);
        gh.weights[n - 1 - i] = gh.weights[i];
    }
    return gh;
}

double maximize_concave(const std::function<double(double)>& f, double x0, double scale,
                        double tol, int max_iter) {
    double x = x0;
    double h = std::max(1e-6 * scale, 1e-9);
    for (int iter = 0; iter < max_iter; ++iter) {
        const double fp = (f(x + h) - f(x - h)) / (2.0 * h);
        const double fpp = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        double step;
        if (fpp < 0.0) {
            step = -fp / fpp;
        } else {
            step = (fp > 0.0 ? scale : -scale); // fall back to a bracketing move
        }
        if (std::abs(step) > 4.0 * scale) step = (step > 0.0 ? 4.0 : -4.0) * scale;
        x += step;
        if (std::abs(step) <= tol * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

} // namespace retromc
