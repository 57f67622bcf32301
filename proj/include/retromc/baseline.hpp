#ifndef RETROMC_BASELINE_HPP
#define RETROMC_BASELINE_HPP

#include <functional>

#include "retromc/params.hpp"
#include "retromc/rng.hpp"

namespace retromc {

struct GridSpec {
    int steps = 50; // trapezoidal scheme, M >= 1 steps
};

// Exact Gaussian moments of the trapezoidal average of sigma W_t + gamma t on
// the uniform grid: mean, variance, and covariance with sigma W_T. As M grows
// they converge to (gamma T/2, sigma^2 T/3, sigma^2 T/2).
struct GeometricMoments {
    double mean = 0.0;
    double variance = 0.0;
    double covariance = 0.0; // with log S_T's Gaussian part sigma W_T
};
GeometricMoments discrete_geometric_moments(const ModelParams& params, const GridSpec& grid);

// One simulated trapezoidal path: discounted payoff and the geometric-average
// control variate Y = e^{-rT}(alpha S_T + beta T exp(G) - K)+.
struct TrapDraw {
    double payoff_value = 0.0;
    double control_value = 0.0;
    double terminal = 0.0;   // S_T
    double average = 0.0;    // trapezoidal int_0^T S dt
};
TrapDraw trap_draw(const ModelParams& params, const UnderlyingPayoff& payoff,
                   const GridSpec& grid, RngStream& rng);

// E[Y] for the discrete control variate, computed by conditioning on log S_T
// and Gauss-Hermite quadrature of the inner lognormal closed form (64 nodes);
// exact at every M up to quadrature error.
double trap_kv_expectation(const ModelParams& params, const GridSpec& grid);

// Trapezoidal pricer with the Kemna-Vorst control variate, lambda = 1 by
// default (fit_lambda switches to the regression coefficient).
RunResult trap_kv_price(const ModelParams& params, const UnderlyingPayoff& payoff,
                        const GridSpec& grid, long n, RngStream& rng, bool fit_lambda = false,
                        bool use_control = true);

// Plain trapezoidal Monte Carlo of an arbitrary functional of (S_T, int S dt);
// test oracle for payoffs outside the alpha/beta family (floating strikes).
RunResult trap_price_custom(const ModelParams& params,
                            const std::function<double(double, double)>& path_payoff,
                            const GridSpec& grid, long n, RngStream& rng);

} // namespace retromc

#endif
