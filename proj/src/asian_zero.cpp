#include "retromc/asian_zero.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "retromc/special_functions.hpp"
#include "retromc/stats.hpp"

namespace retromc {

namespace {

constexpr double kTaylorSwitch = 1e-4;

// q = e^{-z} - 1 + z; n1 = q - z^2/2. Both cancel near 0, so expm1 carries the
// bulk and Taylor forms take over below the switch.
inline double q_term(double z) {
    if (std::abs(z) < kTaylorSwitch) {
        return z * z * (0.5 + z * (-1.0 / 6.0 + z * (1.0 / 24.0 - z / 120.0)));
    }
    return std::expm1(-z) + z;
}

inline double n1_term(double z) {
    if (std::abs(z) < kTaylorSwitch) {
        return z * z * z * (-1.0 / 6.0 + z * (1.0 / 24.0 + z * (-1.0 / 120.0 + z / 720.0)));
    }
    return std::expm1(-z) + z - 0.5 * z * z;
}

} // namespace

double phi_t_z(double t, double z, double gamma, double sigma) {
    if (!(t > 0.0)) throw std::domain_error("phi_t_z: t must be > 0");
    const double s2 = sigma * sigma;
    const double q = q_term(z);
    const double n1 = n1_term(z);
    const double one_minus_e = -std::expm1(-z);
    return n1 / (s2 * t * t) + one_minus_e / (2.0 * t) +
           q / (s2 * t) * (q / (2.0 * t) + gamma - z / t);
}

double phi_plus(double t, double z, double gamma, double sigma) {
    return std::max(phi_t_z(t, z, gamma, sigma), 0.0);
}

double phi_minus(double t, double z, double gamma, double sigma) {
    return std::max(-phi_t_z(t, z, gamma, sigma), 0.0);
}

double weight_exponent(double t, double z, double sigma) {
    if (!(t > 0.0)) throw std::domain_error("weight_exponent: t must be > 0");
    return -n1_term(z) / (sigma * sigma * t);
}

double phi_plus_rectangle_bound(double t_l, double t_u, double m_j, double gamma, double sigma) {
    if (!(t_l > 0.0 && t_u >= t_l)) throw std::domain_error("phi_plus_rectangle_bound: bad interval");
    const double s2 = sigma * sigma;
    const double branch_a = gamma * gamma / s2 + gamma / (s2 * t_l) +
                            std::max(0.5 - gamma / s2, 0.0) / t_l;
    double branch_b = 0.0;
    const double c = std::min(m_j, 0.0);
    if (c < 0.0) {
        const double em = std::expm1(-c); // e^{-c} - 1 > 0
        branch_b = (em + c) * (1.0 + std::max(gamma, 0.0) * t_l) / (s2 * t_l * t_l) +
                   em * em / (2.0 * s2 * t_l * t_l) - c * c / (s2 * t_l * t_l);
    }
    return std::max(branch_a, branch_b);
}

double z_lower_bound(double t_l, double t_u, double m_b, double gamma, double sigma) {
    if (!(t_l > 0.0 && t_u >= t_l)) throw std::domain_error("z_lower_bound: bad interval");
    const double diffusion = sigma / t_l * std::min(0.0, m_b);
    const double drift = 0.5 * gamma * (gamma >= 0.0 ? t_l : t_u);
    return diffusion + drift;
}

TailIntensity small_time_tail_intensity(double eta, double sigma, double gamma) {
    if (!(eta > 0.0 && eta < 0.25))
        throw std::domain_error("small_time_tail_intensity: eta must lie in (0, 1/4)");
    const double c = std::max(sigma / std::pow(3.0, 0.5 - eta / 3.0), 0.5 * gamma);
    TailIntensity out;
    out.kappa = 2.0 * c * c * c / (3.0 * sigma * sigma) + 0.5 * c;
    out.exponent = -0.5 - eta;
    return out;
}

void HybridConfig::validate() const {
    if (dyadic_depth < 1) throw ConfigError("hybrid: J must be >= 1");
    if (!(eta > 0.0 && eta < 0.25)) throw ConfigError("hybrid: eta must lie in (0, 1/4)");
    if (!(c_p > 0.0)) throw ConfigError("hybrid: c_p must be > 0");
    if (retry_cap < 1) throw ConfigError("hybrid: retry cap must be >= 1");
}

ZeroAlphaModel::ZeroAlphaModel(const ModelParams& params) : params_(params) {
    params_.validate();
    if (params_.alpha != 0.0) throw ConfigError("ZeroAlphaModel requires alpha = 0");
    if (!(params_.beta > 0.0)) throw ConfigError("ZeroAlphaModel requires beta > 0");
    gamma_ = params_.gamma();
}

EstimatorSample hybrid_price_sample(const ZeroAlphaModel& model, const HybridConfig& config,
                                    const UnderlyingPayoff& payoff, RngStream& rng,
                                    HybridDiagnostics* diag) {
    return detail::hybrid_sample_impl(model, config, payoff, rng, diag);
}

EstimatorSample hybrid_accepted_sample(const ZeroAlphaModel& model, const HybridConfig& config,
                                       const UnderlyingPayoff& payoff, RngStream& rng,
                                       HybridDiagnostics* diag) {
    return detail::hybrid_accepted_impl(model, config, payoff, rng, diag);
}

double kv_control_variate_price(const ModelParams& params, double strike) {
    if (!(strike > 0.0)) throw std::domain_error("kv_control_variate_price: strike must be > 0");
    const double t = params.maturity;
    const double sigma = params.sigma;
    const double gamma = params.gamma();
    const double dr = params.discount_rate();
    const double v = sigma * std::sqrt(t / 3.0);
    const double d = (std::log(params.s0 / strike) + 0.5 * gamma * t) / v;
    return params.s0 * std::exp((0.5 * gamma + sigma * sigma / 6.0 - dr) * t) * norm_cdf(d + v) -
           strike * std::exp(-dr * t) * norm_cdf(d);
}

HeavyTailReport heavy_tail_diagnostic(const ModelParams& params, const HybridConfig& config,
                                      bool naive, long n, RngStream& rng) {
    HeavyTailReport report;
    if (n <= 0) return report;
    report.n = n;

    ZeroAlphaModel model(params);
    const auto payoff = [&params](double v) { return std::max(v - params.strike, 0.0); };

    RunningStats half, full;
    KahanSum abs_sum;
    double max_abs = 0.0;
    const long snapshots = 20;
    const double t_end = params.maturity;

    for (long i = 0; i < n; ++i) {
        double w;
        if (naive) {
            // full signed-phi product: one Z path, no thinning
            ZPath z(model.gamma(), model.sigma());
            const double z_t = z.at(t_end, rng);
            const long count = rng.poisson(config.c_p * t_end);
            double product = 1.0;
            for (long j = 0; j < count; ++j) {
                const double u = std::max(rng.uniform(0.0, t_end), 1e-12 * t_end);
                product *= -model.phi(u, z.at(u, rng)) / config.c_p;
            }
            w = params.discount_factor() * payoff(model.underlying(z_t)) *
                std::exp(model.exponent_a(t_end, z_t) + config.c_p * t_end) * product;
        } else {
            w = hybrid_price_sample(model, config, payoff, rng).weight;
        }
        full.add(w);
        if (i < n / 2) half.add(w);
        abs_sum.add(std::abs(w));
        max_abs = std::max(max_abs, std::abs(w));
        if (snapshots > 0 && (i + 1) % std::max(n / snapshots, 1L) == 0) {
            report.running_means.push_back(full.mean());
        }
    }
    report.mean = full.mean();
    report.variance = full.count() > 1 ? full.variance() : 0.0;
    report.half_variance = half.count() > 1 ? half.variance() : 0.0;
    report.variance_ratio =
        report.half_variance > 0.0 ? report.variance / report.half_variance : 0.0;
    report.max_abs_share = abs_sum.value() > 0.0 ? max_abs / abs_sum.value() : 0.0;
    return report;
}

} // namespace retromc
