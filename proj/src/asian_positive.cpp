#include "retromc/asian_positive.hpp"

#include <cmath>
#include <stdexcept>

#include "retromc/numeric.hpp"
#include "retromc/special_functions.hpp"

namespace retromc {

namespace {

double phi_of(const ModelParams& p, double u) {
    const double sigma = p.sigma;
    const double a = p.gamma() / sigma + p.beta * p.s0 / sigma * std::exp(-sigma * u);
    const double ap = -p.beta * p.s0 * std::exp(-sigma * u);
    return 0.5 * (a * a + ap);
}

} // namespace

double lower_bound_k(const ModelParams& p) {
    const double gamma = p.gamma();
    const double sigma2 = p.sigma * p.sigma;
    const double flat = gamma * gamma / (2.0 * sigma2);
    if (p.beta * p.s0 == 0.0) return flat; // phi is constant
    if (2.0 * gamma >= sigma2) return flat;
    const double u_dag = std::log(2.0 * p.beta * p.s0 / (sigma2 - 2.0 * gamma)) / p.sigma;
    return phi_of(p, u_dag);
}

double sup_phi_above(double m, const ModelParams& p) {
    const double gamma = p.gamma();
    const double limit = gamma * gamma / (2.0 * p.sigma * p.sigma);
    return std::max(phi_of(p, m), limit) - lower_bound_k(p);
}

PositiveAlphaModel::PositiveAlphaModel(const ModelParams& params) : params_(params) {
    params_.validate();
    if (!(params_.alpha > 0.0)) throw ConfigError("PositiveAlphaModel requires alpha > 0");

    gamma_ = params_.gamma();
    x0_ = std::log(params_.alpha * params_.s0) / params_.sigma;
    beta_s0_ = params_.beta * params_.s0;
    k_ = lower_bound_k(params_);

    const double t = params_.maturity;
    const double sigma = params_.sigma;
    const double w_arg = beta_s0_ * t * std::exp(-gamma_ * t - sigma * x0_);
    u_mode_ = (gamma_ * t + lambert_w0(w_arg) + sigma * x0_) / sigma;

    // log of the rejection envelope: the ratio of h to the N(u_mode, T)
    // proposal is log-concave (A'' = a' < 0), maximised by safeguarded Newton
    auto log_ratio = [this](double u) {
        const double d0 = u - x0_;
        const double d1 = u - u_mode_;
        return drift_primitive(u) - d0 * d0 / (2.0 * params_.maturity) +
               d1 * d1 / (2.0 * params_.maturity);
    };
    const double u_max = maximize_concave(log_ratio, u_mode_, std::sqrt(t));
    log_envelope_ = log_ratio(u_max);
    if (!std::isfinite(log_envelope_))
        throw ModelError("PositiveAlphaModel: envelope maximisation failed");
}

double PositiveAlphaModel::drift(double u) const {
    return gamma_ / params_.sigma + beta_s0_ / params_.sigma * std::exp(-params_.sigma * u);
}

double PositiveAlphaModel::drift_primitive(double u) const {
    const double sigma = params_.sigma;
    return gamma_ / sigma * u + beta_s0_ / (sigma * sigma) * (1.0 - std::exp(-sigma * u));
}

double PositiveAlphaModel::potential(double u) const { return phi_of(params_, u); }

double PositiveAlphaModel::bound_above_min(double m) const {
    const double limit = gamma_ * gamma_ / (2.0 * params_.sigma * params_.sigma);
    return std::max(phi_of(params_, m), limit) - k_;
}

double PositiveAlphaModel::phi_limit() const {
    return gamma_ * gamma_ / (2.0 * params_.sigma * params_.sigma);
}

double PositiveAlphaModel::h_log_derivative(double u) const {
    return drift(u) - (u - x0_) / params_.maturity;
}

bool PositiveAlphaModel::sample_h_attempt(RngStream& rng, double& draw) const {
    const double t = params_.maturity;
    const double u = u_mode_ + std::sqrt(t) * rng.normal();
    const double d0 = u - x0_;
    const double d1 = u - u_mode_;
    const double log_ratio =
        drift_primitive(u) - d0 * d0 / (2.0 * t) + d1 * d1 / (2.0 * t) - log_envelope_;
    if (std::log(rng.uniform_pos()) <= log_ratio) {
        draw = u;
        return true;
    }
    return false;
}

TerminalDraw PositiveAlphaModel::sample_h(RngStream& rng) const {
    double draw = 0.0;
    for (long attempt = 1; attempt <= 100'000'000L; ++attempt) {
        if (sample_h_attempt(rng, draw)) return TerminalDraw{draw, attempt};
    }
    throw ModelError("PositiveAlphaModel: terminal rejection sampler failed to accept");
}

double PositiveAlphaModel::sample_rho(RngStream& rng) const {
    return u_mode_ + std::sqrt(params_.maturity) * rng.normal();
}

double PositiveAlphaModel::rho_density(double z) const {
    const double sd = std::sqrt(params_.maturity);
    return norm_pdf((z - u_mode_) / sd) / sd;
}

EstimatorSample exact_price_sample(const PositiveAlphaModel& model, const UnderlyingPayoff& payoff,
                                   RngStream& rng, long retry_cap) {
    ExactDraw draw = exact_simulate_terminal(model, rng, retry_cap);
    const double underlying = std::exp(model.params().sigma * draw.x_terminal);
    EstimatorSample s;
    s.weight = model.params().discount_factor() * payoff(underlying);
    s.base_weight = 1.0;
    s.accepted = true;
    s.retries = draw.retries;
    s.skeleton_size = static_cast<long>(draw.skeleton.size());
    return s;
}

namespace {

TerminalPayoff to_terminal_payoff(const PositiveAlphaModel& model, const UnderlyingPayoff& payoff) {
    const double df = model.params().discount_factor();
    const double sigma = model.params().sigma;
    return [df, sigma, payoff](double z) { return df * payoff(std::exp(sigma * z)); };
}

} // namespace

EstimatorSample ue_bound_price_sample(const PositiveAlphaModel& model,
                                      const UnderlyingPayoff& payoff, RngStream& rng) {
    UEChoices choices;
    choices.condition_on_minimum = true;
    const double k = model.lower_bound();
    const double t = model.horizon();
    choices.shift_c = [k](double bound) { return bound + k; };
    choices.poisson_rate = [t](double bound) { return bound * t; };
    return ue_sample(model, to_terminal_payoff(model, payoff), choices, rng);
}

EstimatorSample ue_free_price_sample(const PositiveAlphaModel& model,
                                     const UnderlyingPayoff& payoff, double c_p, double c,
                                     RngStream& rng) {
    return ue_poisson_variant(model, to_terminal_payoff(model, payoff), c_p, c, rng);
}

RunResult price_option(const ModelParams& params, const UnderlyingPayoff& payoff,
                       PositiveMethod method, long n, RngStream& rng) {
    if (n < 2) throw ConfigError("price_option: need n >= 2");
    PositiveAlphaModel model(params);
    std::vector<EstimatorSample> samples;
    samples.reserve(static_cast<std::size_t>(n));
    long attempts = 0;
    for (long i = 0; i < n; ++i) {
        EstimatorSample s;
        switch (method) {
            case PositiveMethod::Exact:
                s = exact_price_sample(model, payoff, rng);
                attempts += s.retries + 1;
                break;
            case PositiveMethod::UEBound:
                s = ue_bound_price_sample(model, payoff, rng);
                break;
            case PositiveMethod::UEFree:
                s = ue_free_price_sample(model, payoff, 1.0 / params.maturity,
                                         1.0 / params.maturity, rng);
                break;
        }
        samples.push_back(s);
    }
    RunResult r = aggregate_delta1(samples);
    if (method == PositiveMethod::Exact && attempts > 0) {
        r.acceptance_rate = static_cast<double>(n) / static_cast<double>(attempts);
    }
    return r;
}

FloatingStrikeReduction floating_strike_reduce(const ModelParams& params) {
    // Changing numeraire to S e^{delta t} and reversing time turns the
    // floating call into E[e^{-delta T}(xi_T - S0)+] where xi averages a
    // lognormal with log-drift -(r - delta + sigma^2/2). The averaged ratio is
    // S_u/S_T, hence the reversed sign relative to the fixed-strike drift.
    FloatingStrikeReduction red;
    red.reduced = params;
    red.reduced.alpha = 0.0;
    red.reduced.beta = 1.0 / params.maturity;
    red.reduced.strike = params.s0;
    red.reduced.gamma_override =
        -(params.r - params.dividend + 0.5 * params.sigma * params.sigma);
    red.reduced.discount_override = params.dividend;
    red.strike = params.s0;
    red.discount_rate = params.dividend;
    return red;
}

} // namespace retromc
