#ifndef RETROMC_ENGINE_HPP
#define RETROMC_ENGINE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "retromc/params.hpp"
#include "retromc/path_skeleton.hpp"
#include "retromc/rng.hpp"

namespace retromc {

struct TerminalDraw {
    double value = 0.0;
    long attempts = 1;
};

// One-dimensional unit-diffusion model dX = a(X) dt + dW on [0, T]. The
// retrospective machinery needs the drift a, its primitive A, the potential
// phi = (a^2 + a')/2 with lower bound k, an upper bound for phi - k on
// {u >= m}, a sampler for the tilted terminal density h, and the free
// proposal density rho used by the unbiased estimator.
class ExactModel {
public:
    virtual ~ExactModel() = default;

    virtual double drift(double u) const = 0;
    virtual double drift_primitive(double u) const = 0;
    virtual double potential(double u) const = 0;
    virtual double lower_bound() const = 0;
    virtual double bound_above_min(double m) const = 0;
    virtual TerminalDraw sample_h(RngStream& rng) const = 0;
    virtual double sample_rho(RngStream& rng) const = 0;
    virtual double rho_density(double z) const = 0;
    virtual double start() const = 0;
    virtual double horizon() const = 0;
};

struct ExactDraw {
    double x_terminal = 0.0;
    PathSkeleton skeleton;
    long retries = 0;       // rejected proposals before acceptance
    long h_attempts = 0;    // terminal-density rejection attempts, summed
};

// One proposal attempt of the path-level rejection sampler: draw the ending
// point from h, the bridge minimum, then thin a Poisson rectangle against
// phi - k. Returns the skeleton on acceptance, nothing on rejection.
struct ExactAttempt {
    bool accepted = false;
    double x_terminal = 0.0;
    PathSkeleton skeleton{0.0, 0.0};
    long h_attempts = 0;
};
ExactAttempt exact_attempt(const ExactModel& model, RngStream& rng);

// Acceptance/rejection over whole proposal paths, repeated to acceptance.
// The accepted skeleton supports further conditioned fill-in.
ExactDraw exact_simulate_terminal(const ExactModel& model, RngStream& rng,
                                  long retry_cap = 10'000'000);

// Count/time laws for the random product. The shift c and the Poisson rate
// may depend on the path bound M_Z (drawn from the bridge minimum) when
// condition_on_minimum is set. Custom laws serve the optimal-law tests.
struct UEChoices {
    bool condition_on_minimum = false;
    std::function<double(double bound)> shift_c;        // c given M_Z (NaN if unused)
    std::function<double(double bound)> poisson_rate;   // if set, p = Poisson(rate)
    std::function<long(RngStream&)> custom_count_sampler;
    std::function<double(long)> custom_count_pmf;
    std::function<double(RngStream&)> time_sampler;     // if unset, uniform on [0, T]
    std::function<double(double)> time_density;
};

// payoff on the terminal state of X (already discounted by the caller)
using TerminalPayoff = std::function<double(double)>;

// One draw of the generalized Poisson estimator
//   psi(Z_T) e^{-cT} (p(N) N!)^{-1} prod (c - phi(Z_{V_i})) / q(V_i)
// with psi(z) = f(z) exp(A(z) - A(x0) - (z-x0)^2/(2T)) / (sqrt(2 pi T) rho(z)).
// The square-integrability of the result for the caller's (model, choices) is
// a caller obligation; see the heavy-tail diagnostic for a detector.
EstimatorSample ue_sample(const ExactModel& model, const TerminalPayoff& payoff,
                          const UEChoices& choices, RngStream& rng);

// Poisson-count specialisation: p = Poisson(c_P T), q uniform, weight
// psi(Z_T) e^{(c_P - c) T} prod (c - phi(Z_{V_i})) / c_P.
EstimatorSample ue_poisson_variant(const ExactModel& model, const TerminalPayoff& payoff,
                                   double c_p, double c, RngStream& rng);

// Variance-optimal count/time laws for E[(p(N) N!)^{-1} prod g(V_i)/q(V_i)]:
// q propto |g| and p = Poisson(int |g|); attains second moment exp(2 int |g|).
struct OptimalLaws {
    double total_mass = 0.0;                          // int_0^T |g|
    std::function<double(double)> time_density;       // q_opt
    std::function<double(RngStream&)> time_sampler;
    double poisson_rate = 0.0;                        // p_opt parameter
};
OptimalLaws optimal_count_time_laws(const std::function<double(double)>& g, double horizon);

// delta_1: plain sample mean of weights. delta_2: self-normalised ratio of
// payoff-weighted to payoff-free weights.
RunResult aggregate_delta1(const std::vector<EstimatorSample>& samples);
RunResult aggregate_delta2(const std::vector<EstimatorSample>& samples);

} // namespace retromc

#endif
