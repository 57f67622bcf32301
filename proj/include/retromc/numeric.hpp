#ifndef RETROMC_NUMERIC_HPP
#define RETROMC_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace retromc {

// Adaptive Simpson quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

// Nodes and weights for n-point Gauss-Hermite quadrature (weight exp(-x^2)).
// For Z ~ N(0,1): E[g(Z)] = sum_i w_i * g(sqrt(2) x_i) / sqrt(pi).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermite gauss_hermite(int n);

// Maximise a smooth concave function by Newton with bisection safeguards.
// Derivatives are taken by central differences. Returns the maximiser.
double maximize_concave(const std::function<double(double)>& f, double x0,
                        double scale, double tol = 1e-12, int max_iter = 200);

} // namespace retromc

#endif
