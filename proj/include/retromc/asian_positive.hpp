#ifndef RETROMC_ASIAN_POSITIVE_HPP
#define RETROMC_ASIAN_POSITIVE_HPP

#include <functional>

#include "retromc/engine.hpp"
#include "retromc/params.hpp"

namespace retromc {

// Weighted-average model with alpha > 0. After the log change of variables
// the underlying alpha S_T + beta int S solves a unit-diffusion SDE with
//   a(u) = gamma/sigma + (beta S0 / sigma) e^{-sigma u},
// started from x0 = log(alpha S0)/sigma; the option value is
// E[e^{-rT} f(e^{sigma X_T})].
class PositiveAlphaModel : public ExactModel {
public:
    explicit PositiveAlphaModel(const ModelParams& params);

    double drift(double u) const override;
    double drift_primitive(double u) const override;
    double potential(double u) const override;
    double lower_bound() const override { return k_; }
    double bound_above_min(double m) const override;
    TerminalDraw sample_h(RngStream& rng) const override;
    double sample_rho(RngStream& rng) const override;
    double rho_density(double z) const override;
    double start() const override { return x0_; }
    double horizon() const override { return params_.maturity; }

    // mode of the tilted terminal density h (via the Lambert W function)
    double h_mode() const { return u_mode_; }
    // single proposal of the h rejection sampler; true on acceptance
    bool sample_h_attempt(RngStream& rng, double& draw) const;
    // residual of the stationarity equation a(u) - (u - x0)/T at u
    double h_log_derivative(double u) const;
    // phi(u) -> gamma^2 / (2 sigma^2) as u -> +infinity
    double phi_limit() const;

    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    double gamma_;
    double x0_;
    double beta_s0_;
    double k_;
    double u_mode_;
    double log_envelope_; // sup over u of log h_unnorm(u) - log rho_unnorm(u)
};

// inf phi; closed form split on the sign of sigma^2 - 2 gamma
double lower_bound_k(const ModelParams& params);

// sup { phi(u) - k : u >= m } = max(phi(m), gamma^2/(2 sigma^2)) - k.
// phi is convex in y = e^{-sigma u}, so the sup over the y-interval
// (0, e^{-sigma m}] is attained at an endpoint.
double sup_phi_above(double m, const ModelParams& params);

enum class PositiveMethod { Exact, UEBound, UEFree };

// One-draw kernels (the worker pool feeds them disjoint substreams).
EstimatorSample exact_price_sample(const PositiveAlphaModel& model, const UnderlyingPayoff& payoff,
                                   RngStream& rng, long retry_cap = 10'000'000);
EstimatorSample ue_bound_price_sample(const PositiveAlphaModel& model,
                                      const UnderlyingPayoff& payoff, RngStream& rng);
EstimatorSample ue_free_price_sample(const PositiveAlphaModel& model,
                                     const UnderlyingPayoff& payoff, double c_p, double c,
                                     RngStream& rng);

// Sequential pricing entry point (tests and small runs).
RunResult price_option(const ModelParams& params, const UnderlyingPayoff& payoff,
                       PositiveMethod method, long n, RngStream& rng);

// Floating-strike call reduced to a fixed-strike average problem: price
// E[e^{-delta T} (xi_T - S0)+] where xi is built with gamma' = r - delta + sigma^2/2.
struct FloatingStrikeReduction {
    ModelParams reduced;
    double strike;
    double discount_rate;
};
FloatingStrikeReduction floating_strike_reduce(const ModelParams& params);

} // namespace retromc

#endif
