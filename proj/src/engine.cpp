#include "retromc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "retromc/numeric.hpp"
#include "retromc/stats.hpp"

namespace retromc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double psi_factor(const ExactModel& model, double z) {
    const double t = model.horizon();
    const double x0 = model.start();
    const double rho = model.rho_density(z);
    if (!(rho > 0.0)) throw std::invalid_argument("ue_sample: rho must be positive at the draw");
    const double expo = model.drift_primitive(z) - model.drift_primitive(x0) -
                        (z - x0) * (z - x0) / (2.0 * t);
    return std::exp(expo) / (std::sqrt(kTwoPi * t) * rho);
}

} // namespace

ExactAttempt exact_attempt(const ExactModel& model, RngStream& rng) {
    const double t_end = model.horizon();
    const double k = model.lower_bound();

    const TerminalDraw end = model.sample_h(rng);

    ExactAttempt out;
    out.h_attempts = end.attempts;
    out.skeleton = PathSkeleton(0.0, model.start());
    out.skeleton.append_knot(t_end, end.value);
    const BridgeMinimum bm = out.skeleton.record_bridge_minimum(rng);

    const double bound = model.bound_above_min(bm.min_value);
    if (!std::isfinite(bound) || bound < 0.0)
        throw ModelError("exact_attempt: invalid bound above the path minimum");

    if (bound > 0.0) {
        const long n = rng.poisson(t_end * bound);
        for (long i = 0; i < n; ++i) {
            const double u = rng.uniform(0.0, t_end);
            const double v = rng.uniform(0.0, bound);
            const double zu = out.skeleton.value_at(u, rng);
            if (v <= model.potential(zu) - k) return out; // rejected
        }
    }
    out.accepted = true;
    out.x_terminal = end.value;
    return out;
}

ExactDraw exact_simulate_terminal(const ExactModel& model, RngStream& rng, long retry_cap) {
    long h_attempts = 0;
    for (long attempt = 0; attempt <= retry_cap; ++attempt) {
        ExactAttempt a = exact_attempt(model, rng);
        h_attempts += a.h_attempts;
        if (a.accepted) {
            return ExactDraw{a.x_terminal, std::move(a.skeleton), attempt, h_attempts};
        }
    }
    throw DivergenceError("exact_simulate_terminal: retry cap exceeded");
}

EstimatorSample ue_sample(const ExactModel& model, const TerminalPayoff& payoff,
                          const UEChoices& choices, RngStream& rng) {
    const double t_end = model.horizon();
    const double z_t = model.sample_rho(rng);

    PathSkeleton skeleton(0.0, model.start());
    skeleton.append_knot(t_end, z_t);

    double bound = std::numeric_limits<double>::quiet_NaN();
    if (choices.condition_on_minimum) {
        const BridgeMinimum bm = skeleton.record_bridge_minimum(rng);
        bound = model.bound_above_min(bm.min_value);
        if (!std::isfinite(bound)) throw ModelError("ue_sample: invalid bound above the minimum");
    }
    const double c = choices.shift_c(bound);

    // log of e^{-cT} / (p(N) N!); combining the exponents first keeps the
    // bound-dependent case at e^{-kT} instead of a 0 * inf product
    long n = 0;
    double log_prefactor = -c * t_end;
    double poisson_rate = 0.0;
    const bool poisson_count = static_cast<bool>(choices.poisson_rate);
    if (poisson_count) {
        poisson_rate = choices.poisson_rate(bound);
        if (!(poisson_rate >= 0.0)) throw std::invalid_argument("ue_sample: negative count rate");
        n = rng.poisson(poisson_rate);
        log_prefactor += poisson_rate; // lambda^N folded into the product below
    } else {
        n = choices.custom_count_sampler(rng);
        const double pmf = choices.custom_count_pmf(n);
        if (!(pmf > 0.0)) throw std::invalid_argument("ue_sample: count pmf must be positive");
        log_prefactor += -std::log(pmf) - std::lgamma(static_cast<double>(n) + 1.0);
    }

    double product = 1.0;
    for (long i = 0; i < n; ++i) {
        double v, q;
        if (choices.time_sampler) {
            v = choices.time_sampler(rng);
            q = choices.time_density(v);
        } else {
            v = rng.uniform(0.0, t_end);
            q = 1.0 / t_end;
        }
        if (!(q > 0.0)) throw std::invalid_argument("ue_sample: time density must be positive");
        const double zv = skeleton.value_at(v, rng);
        double factor = (c - model.potential(zv)) / q;
        if (poisson_count) factor /= poisson_rate;
        product *= factor;
    }

    const double shared = std::exp(log_prefactor) * product;
    const double psi1 = psi_factor(model, z_t);

    EstimatorSample s;
    s.weight = payoff(z_t) * psi1 * shared;
    s.base_weight = psi1 * shared;
    s.poisson_count = n;
    s.skeleton_size = static_cast<long>(skeleton.size());
    if (!std::isfinite(s.weight)) throw ModelError("ue_sample: non-finite weight");
    return s;
}

EstimatorSample ue_poisson_variant(const ExactModel& model, const TerminalPayoff& payoff,
                                   double c_p, double c, RngStream& rng) {
    if (!(c_p > 0.0)) throw std::domain_error("ue_poisson_variant: c_p must be > 0");
    const double t_end = model.horizon();
    const double z_t = model.sample_rho(rng);

    PathSkeleton skeleton(0.0, model.start());
    skeleton.append_knot(t_end, z_t);

    const long n = rng.poisson(c_p * t_end);
    double product = 1.0;
    for (long i = 0; i < n; ++i) {
        const double v = rng.uniform(0.0, t_end);
        const double zv = skeleton.value_at(v, rng);
        product *= (c - model.potential(zv)) / c_p;
    }

    const double shared = std::exp((c_p - c) * t_end) * product;
    const double psi1 = psi_factor(model, z_t);

    EstimatorSample s;
    s.weight = payoff(z_t) * psi1 * shared;
    s.base_weight = psi1 * shared;
    s.poisson_count = n;
    s.skeleton_size = static_cast<long>(skeleton.size());
    if (!std::isfinite(s.weight)) throw ModelError("ue_poisson_variant: non-finite weight");
    return s;
}

OptimalLaws optimal_count_time_laws(const std::function<double(double)>& g, double horizon) {
    if (!(horizon > 0.0)) throw std::domain_error("optimal_count_time_laws: horizon must be > 0");
    auto abs_g = [&g](double t) { return std::abs(g(t)); };
    const double mass = integrate(abs_g, 0.0, horizon, 1e-10);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::domain_error("optimal_count_time_laws: int |g| must be positive and finite");

    // tabulated inverse CDF for the sampler
    const int grid = 2048;
    auto cdf = std::make_shared<std::vector<double>>(grid + 1, 0.0);
    const double dt = horizon / grid;
    double acc = 0.0;
    double prev = abs_g(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double cur = abs_g(i * dt);
        acc += 0.5 * (prev + cur) * dt;
        (*cdf)[i] = acc;
        prev = cur;
    }
    const double total = acc;
    for (auto& v : *cdf) v /= total;

    OptimalLaws laws;
    laws.total_mass = mass;
    laws.poisson_rate = mass;
    laws.time_density = [g, mass](double t) { return std::abs(g(t)) / mass; };
    laws.time_sampler = [cdf, dt, grid](RngStream& rng) {
        const double u = rng.uniform();
        auto it = std::lower_bound(cdf->begin(), cdf->end(), u);
        if (it == cdf->begin()) return 0.0;
        const auto idx = static_cast<std::size_t>(it - cdf->begin());
        const double c0 = (*cdf)[idx - 1];
        const double c1 = (*cdf)[idx];
        const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
        return (static_cast<double>(idx - 1) + frac) * dt;
    };
    return laws;
}

RunResult aggregate_delta1(const std::vector<EstimatorSample>& samples) {
    if (samples.size() < 2) throw std::runtime_error("aggregate_delta1: need >= 2 samples");
    RunningStats stats;
    for (const auto& s : samples) stats.add(s.weight);
    return summarize(stats);
}

RunResult aggregate_delta2(const std::vector<EstimatorSample>& samples) {
    if (samples.size() < 2) throw std::runtime_error("aggregate_delta2: need >= 2 samples");
    PairedStats stats;
    for (const auto& s : samples) stats.add(s.weight, s.base_weight);
    return summarize_ratio(stats);
}

} // namespace retromc
