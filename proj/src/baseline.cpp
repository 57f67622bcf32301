#include "retromc/baseline.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "retromc/numeric.hpp"
#include "retromc/special_functions.hpp"
#include "retromc/stats.hpp"

namespace retromc {

GeometricMoments discrete_geometric_moments(const ModelParams& params, const GridSpec& grid) {
    if (grid.steps < 1) throw ConfigError("discrete_geometric_moments: M must be >= 1");
    const double m = grid.steps;
    const double t = params.maturity;
    const double s2 = params.sigma * params.sigma;

    GeometricMoments out;
    out.mean = 0.5 * params.gamma() * t;
    // sum_{l=1..M} (l - 1/2)^2, from the trapezoid-weight double sum
    const double s = m * (m + 1.0) * (2.0 * m + 1.0) / 6.0 - m * (m + 1.0) / 2.0 + m / 4.0;
    out.variance = s2 * t * s / (m * m * m);
    out.covariance = 0.5 * s2 * t;
    return out;
}

namespace {

// E[(a + b e^Y - strike)+] for Y ~ N(mu, sd^2), a >= 0, b >= 0.
double lognormal_call_shifted(double a, double b, double mu, double sd, double strike) {
    if (b <= 0.0) return std::max(a - strike, 0.0);
    if (sd <= 0.0) return std::max(a + b * std::exp(mu) - strike, 0.0);
    const double k_eff = strike - a;
    if (k_eff <= 0.0) return a - strike + b * std::exp(mu + 0.5 * sd * sd);
    const double d2 = (mu - std::log(k_eff / b)) / sd;
    const double d1 = d2 + sd;
    return b * std::exp(mu + 0.5 * sd * sd) * norm_cdf(d1) - k_eff * norm_cdf(d2);
}

} // namespace

double trap_kv_expectation(const ModelParams& params, const GridSpec& grid) {
    const GeometricMoments gm = discrete_geometric_moments(params, grid);
    const double t = params.maturity;
    const double df = params.discount_factor();
    const double b = params.beta * t * params.s0;

    if (params.alpha == 0.0) {
        return df * lognormal_call_shifted(0.0, b, gm.mean, std::sqrt(gm.variance),
                                           params.strike);
    }

    // condition on the Gaussian part x = sigma W_T of log S_T
    const double var_x = params.sigma * params.sigma * t;
    const double slope = gm.covariance / var_x;
    const double cond_var = std::max(gm.variance - gm.covariance * gm.covariance / var_x, 0.0);
    const double cond_sd = std::sqrt(cond_var);

    static const GaussHermite gh = gauss_hermite(64);
    const double inv_sqrt_pi = 0.5641895835477562869480794515608;
    const double sd_x = std::sqrt(var_x);

    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double x = 1.4142135623730950488016887242097 * sd_x * gh.nodes[i];
        const double a = params.alpha * params.s0 * std::exp(x + params.gamma() * t);
        const double mu = gm.mean + slope * x;
        acc += gh.weights[i] * lognormal_call_shifted(a, b, mu, cond_sd, params.strike);
    }
    return df * acc * inv_sqrt_pi;
}

TrapDraw trap_draw(const ModelParams& params, const UnderlyingPayoff& payoff,
                   const GridSpec& grid, RngStream& rng) {
    const int m = grid.steps;
    const double t = params.maturity;
    const double dt = t / m;
    const double sqrt_dt = std::sqrt(dt);
    const double gamma = params.gamma();
    const double sigma = params.sigma;
    const double df = params.discount_factor();

    double w = 0.0;
    double s_prev = params.s0;
    double integral = 0.0;
    double log_avg = 0.0; // trapezoid of sigma W + gamma t, scaled by dt/T below
    double s_cur = params.s0;
    for (int i = 1; i <= m; ++i) {
        w += sqrt_dt * rng.normal();
        const double drift_term = sigma * w + gamma * (i * dt);
        s_cur = params.s0 * std::exp(drift_term);
        integral += 0.5 * (s_prev + s_cur) * dt;
        log_avg += (i == m ? 0.5 : 1.0) * drift_term;
        s_prev = s_cur;
    }
    log_avg *= dt / t;

    TrapDraw out;
    out.terminal = s_cur;
    out.average = integral;
    out.payoff_value = df * payoff(params.alpha * s_cur + params.beta * integral);
    const double geo = params.beta * t * params.s0 * std::exp(log_avg);
    out.control_value = df * std::max(params.alpha * s_cur + geo - params.strike, 0.0);
    return out;
}

RunResult trap_kv_price(const ModelParams& params, const UnderlyingPayoff& payoff,
                        const GridSpec& grid, long n, RngStream& rng, bool fit_lambda,
                        bool use_control) {
    if (n < 2) throw ConfigError("trap_kv_price: need n >= 2");
    params.validate();
    if (grid.steps < 1) throw ConfigError("trap_kv_price: M must be >= 1");

    if (!use_control) {
        RunningStats stats;
        for (long i = 0; i < n; ++i) stats.add(trap_draw(params, payoff, grid, rng).payoff_value);
        return summarize(stats);
    }
    PairedStats stats;
    for (long i = 0; i < n; ++i) {
        const TrapDraw d = trap_draw(params, payoff, grid, rng);
        stats.add(d.payoff_value, d.control_value);
    }
    return summarize_with_control(stats, trap_kv_expectation(params, grid), fit_lambda);
}

RunResult trap_price_custom(const ModelParams& params,
                            const std::function<double(double, double)>& path_payoff,
                            const GridSpec& grid, long n, RngStream& rng) {
    if (n < 2) throw ConfigError("trap_price_custom: need n >= 2");
    RunningStats stats;
    const auto identity = [](double v) { return v; };
    for (long i = 0; i < n; ++i) {
        const TrapDraw d = trap_draw(params, identity, grid, rng);
        stats.add(path_payoff(d.terminal, d.average));
    }
    return summarize(stats);
}

} // namespace retromc
