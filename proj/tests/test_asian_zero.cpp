#include <doctest.h>

#include <cmath>
#include <vector>

#include "retromc/asian_zero.hpp"
#include "retromc/numeric.hpp"
#include "retromc/special_functions.hpp"
#include "retromc/stats.hpp"

using retromc::HybridConfig;
using retromc::ModelParams;
using retromc::RngStream;
using retromc::ZeroAlphaModel;

namespace {

ModelParams asian_params() {
    ModelParams p;
    p.s0 = 100.0;
    p.strike = 100.0;
    p.r = 0.1;
    p.sigma = 0.2;
    p.dividend = 0.0;
    p.maturity = 1.0;
    p.alpha = 0.0;
    p.beta = 1.0;
    return p;
}

// long-double reference for phi: series numerators below |z| = 1e-2, direct
// expm1l above. Truncation error of the 14-term series is ~1e-26 relative in
// that range, well below the comparison tolerance.
long double phi_reference(long double t, long double z, long double gamma, long double sigma) {
    long double q, n1;
    if (std::abs(static_cast<double>(z)) < 1e-2) {
        long double term = z * z / 2.0L; // z^2/2!
        q = term;
        long double sum_n1 = 0.0L;
        for (int k = 3; k <= 16; ++k) {
            term *= -z / static_cast<long double>(k);
            q += term;
            sum_n1 += term;
        }
        n1 = sum_n1;
    } else {
        q = expm1l(-z) + z;
        n1 = q - z * z / 2.0L;
    }
    const long double s2 = sigma * sigma;
    const long double one_minus_e = -expm1l(-z);
    return n1 / (s2 * t * t) + one_minus_e / (2.0L * t) +
           q / (s2 * t) * (q / (2.0L * t) + gamma - z / t);
}

// test-local second normal CDF built on quadrature of the density
double norm_cdf_quadrature(double x) {
    if (x < -12.0) return 0.0;
    if (x > 12.0) return 1.0;
    return 0.5 + retromc::integrate([](double u) { return retromc::norm_pdf(u); },
                                    0.0, x, 1e-13);
}

// stub model with the potential forced to zero (weight oracle hook)
class PhiZeroModel {
public:
    explicit PhiZeroModel(const ModelParams& p) : inner_(p) {}
    double phi(double, double) const { return 0.0; }
    double phi_pos(double, double) const { return 0.0; }
    double phi_neg(double, double) const { return 0.0; }
    double exponent_a(double t, double z) const { return inner_.exponent_a(t, z); }
    double gamma() const { return inner_.gamma(); }
    double sigma() const { return inner_.sigma(); }
    const ModelParams& params() const { return inner_.params(); }
    double underlying(double z) const { return inner_.underlying(z); }

private:
    ZeroAlphaModel inner_;
};

} // namespace

TEST_CASE("phi(t, z): zero line, reference accuracy, asymptotics") {
    const double gamma = 0.08, sigma = 0.2;

    for (double t : {0.01, 0.1, 0.5, 1.0}) {
        CHECK(retromc::phi_t_z(t, 0.0, gamma, sigma) == 0.0);
        CHECK(retromc::weight_exponent(t, 0.0, sigma) == 0.0);
    }
    CHECK_THROWS_AS(retromc::phi_t_z(0.0, 0.1, gamma, sigma), std::domain_error);
    CHECK_THROWS_AS(retromc::phi_t_z(-1.0, 0.1, gamma, sigma), std::domain_error);

    SUBCASE("matches the extended-precision reference across the switch") {
        for (double t : {0.1, 0.5, 1.0}) {
            for (double az : {1e-6, 1e-5, 5e-5, 1e-4, 2e-4, 1e-3, 1e-2, 0.1, 1.0}) {
                for (double sign : {-1.0, 1.0}) {
                    const double z = sign * az;
                    const double got = retromc::phi_t_z(t, z, gamma, sigma);
                    const double ref = static_cast<double>(phi_reference(t, z, gamma, sigma));
                    const double scale = std::max(std::abs(ref), std::abs(z) / (2.0 * t));
                    CHECK(std::abs(got - ref) <= 1e-10 * scale);
                }
            }
        }
        // spot value away from the cancellation region
        const double direct = static_cast<double>(phi_reference(0.5L, -1.0L, gamma, sigma));
        CHECK(retromc::phi_t_z(0.5, -1.0, gamma, sigma) ==
              doctest::Approx(direct).epsilon(1e-10));
    }

    SUBCASE("deep negative z blows up like e^{-2z}") {
        const double v = retromc::phi_t_z(0.5, -10.0, gamma, sigma);
        CHECK(v > 1e6);
        // dominant term (e^{-z}-1+z)^2/(2 sigma^2 t^2) ~ e^{-2z}/(2 sigma^2 t^2)
        CHECK(v > 0.5 * std::exp(20.0) / (2.0 * sigma * sigma * 0.25));
        // large positive z drives phi negative
        CHECK(retromc::phi_t_z(0.5, 10.0, gamma, sigma) < 0.0);
    }

    SUBCASE("positive/negative split partitions phi") {
        RngStream rng(61, 0, 0);
        for (int i = 0; i < 10000; ++i) {
            const double t = 0.01 + rng.uniform();
            const double z = rng.uniform(-2.0, 2.0);
            const double f = retromc::phi_t_z(t, z, gamma, sigma);
            const double fp = retromc::phi_plus(t, z, gamma, sigma);
            const double fm = retromc::phi_minus(t, z, gamma, sigma);
            CHECK(fp >= 0.0);
            CHECK(fm >= 0.0);
            CHECK(fp * fm == 0.0);
            CHECK(fp - fm == doctest::Approx(f).epsilon(1e-12));
        }
    }
}

TEST_CASE("rectangle bound for the positive part of the potential") {
    SUBCASE("m = 0 and gamma = 0 reduce to 1/(2 t_l)") {
        CHECK(retromc::phi_plus_rectangle_bound(0.5, 1.0, 0.0, 0.0, 0.2) ==
              doctest::Approx(1.0).epsilon(1e-14));
        CHECK(retromc::phi_plus_rectangle_bound(0.25, 0.5, 0.3, 0.0, 0.2) ==
              doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("grid-sup comparison on a reference rectangle") {
        const double gamma = 0.08, sigma = 0.2;
        const double bound = retromc::phi_plus_rectangle_bound(0.5, 1.0, -0.3, gamma, sigma);
        double sup = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double t = 0.5 + 0.5 * i / 200.0;
            for (int j = 0; j <= 200; ++j) {
                const double z = -0.3 + 3.3 * j / 200.0;
                sup = std::max(sup, retromc::phi_plus(t, z, gamma, sigma));
            }
        }
        CHECK(bound >= sup);
        CHECK(bound / sup <= 10.0);
    }

    SUBCASE("domination on random points") {
        const double gamma = 0.08, sigma = 0.2;
        RngStream rng(62, 0, 0);
        for (int i = 0; i < 10000; ++i) {
            const double t_l = 0.05 + 0.4 * rng.uniform();
            const double t_u = t_l + 0.5 * rng.uniform();
            const double m_j = -0.5 * rng.uniform();
            const double bound = retromc::phi_plus_rectangle_bound(t_l, t_u, m_j, gamma, sigma);
            const double t = rng.uniform(t_l, t_u);
            const double z = m_j + 4.0 * rng.uniform();
            CHECK(retromc::phi_plus(t, z, gamma, sigma) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("lower bound for Z from the internal-clock minimum") {
    SUBCASE("nonnegative pieces") {
        CHECK(retromc::z_lower_bound(0.25, 0.5, 0.1, 0.08, 0.2) ==
              doctest::Approx(0.5 * 0.08 * 0.25).epsilon(1e-14));
    }
    SUBCASE("spec arithmetic case") {
        CHECK(retromc::z_lower_bound(0.25, 0.5, -0.05, 0.08, 0.2) ==
              doctest::Approx(-0.03).epsilon(1e-12));
    }
    SUBCASE("negative gamma takes the far end of the interval") {
        CHECK(retromc::z_lower_bound(0.25, 0.5, 0.0, -0.1, 0.2) ==
              doctest::Approx(-0.05 * 0.5).epsilon(1e-12));
    }
    SUBCASE("domination over simulated fill-ins") {
        const double gamma = 0.08, sigma = 0.2;
        RngStream rng(63, 0, 0);
        const double t_l = 0.25, t_u = 0.5;
        const double s_l = retromc::internal_clock(t_l), s_u = retromc::internal_clock(t_u);
        for (int i = 0; i < 10000; ++i) {
            const double b_l = std::sqrt(s_l) * rng.normal();
            const double b_u = b_l + std::sqrt(s_u - s_l) * rng.normal();
            retromc::PathSkeleton sk(s_l, b_l);
            sk.append_knot(s_u, b_u);
            const auto bm = sk.record_bridge_minimum(rng);
            const double m_j = retromc::z_lower_bound(t_l, t_u, bm.min_value, gamma, sigma);
            const double t = rng.uniform(t_l, t_u);
            const double b = sk.value_at(retromc::internal_clock(t), rng);
            CHECK(retromc::z_from_b(b, t, gamma, sigma) >= m_j - 1e-12);
        }
    }
}

TEST_CASE("small-time tail intensity") {
    const auto tail = retromc::small_time_tail_intensity(0.1, 0.2, 0.08);
    // independent long-double re-evaluation of the constants
    const long double c = std::max(0.2L / powl(3.0L, 0.5L - 0.1L / 3.0L), 0.04L);
    const long double kappa = 2.0L * c * c * c / (3.0L * 0.04L) + c / 2.0L;
    CHECK(tail.kappa == doctest::Approx(static_cast<double>(kappa)).epsilon(1e-12));
    CHECK(tail.kappa == doctest::Approx(0.0885).epsilon(3e-3));
    CHECK(tail.exponent == doctest::Approx(-0.6));

    // gamma <= 0 picks the sigma branch
    const auto tail2 = retromc::small_time_tail_intensity(0.1, 0.2, -0.5);
    const double c2 = 0.2 / std::pow(3.0, 0.5 - 0.1 / 3.0);
    CHECK(tail2.kappa ==
          doctest::Approx(2.0 * c2 * c2 * c2 / (3.0 * 0.04) + 0.5 * c2).epsilon(1e-12));

    // cumulative mass vanishes with eps (order eps^{1/2 - eta})
    double prev = tail.cumulative(0.25);
    for (double eps : {0.0625, 0.015625, 1e-4, 1e-12}) {
        const double cur = tail.cumulative(eps);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 1e-5);

    // inverse-CDF time marks stay in (0, eps]
    RngStream rng(64, 0, 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = tail.inverse_cdf_time(0.25, rng.uniform_pos());
        CHECK(u > 0.0);
        CHECK(u <= 0.25);
    }

    CHECK_THROWS_AS(retromc::small_time_tail_intensity(0.0, 0.2, 0.08), std::domain_error);
    CHECK_THROWS_AS(retromc::small_time_tail_intensity(0.25, 0.2, 0.08), std::domain_error);
    CHECK_THROWS_AS(retromc::small_time_tail_intensity(0.3, 0.2, 0.08), std::domain_error);
}

TEST_CASE("hybrid config validation") {
    HybridConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dyadic_depth = 0;
    CHECK_THROWS_AS(cfg.validate(), retromc::ConfigError);
    cfg = HybridConfig{};
    cfg.eta = 0.3;
    CHECK_THROWS_AS(cfg.validate(), retromc::ConfigError);
    cfg = HybridConfig{};
    cfg.c_p = 0.0;
    CHECK_THROWS_AS(cfg.validate(), retromc::ConfigError);
}

TEST_CASE("hybrid weight oracle with the potential forced to zero") {
    const ModelParams p = asian_params();
    const PhiZeroModel model(p);
    HybridConfig cfg;
    cfg.dyadic_depth = 6;
    const auto one = [](double) { return 1.0; };

    RngStream qrng(0, 0, 0);
    // quadrature target: e^{-rT} E[e^{A(T, Z_T)}] under Z_T ~ N(gamma T/2, sigma^2 T/3)
    const double mu = 0.5 * p.gamma() * p.maturity;
    const double sd = p.sigma * std::sqrt(p.maturity / 3.0);
    const double target =
        std::exp(-p.r * p.maturity) *
        retromc::integrate(
            [&](double z) {
                return std::exp(retromc::weight_exponent(p.maturity, z, p.sigma)) *
                       retromc::norm_pdf((z - mu) / sd) / sd;
            },
            mu - 12.0 * sd, mu + 12.0 * sd, 1e-12);

    const int n = 200000;
    retromc::RunningStats stats;
    for (int i = 0; i < n; ++i) {
        RngStream rng(65, 0, static_cast<std::uint64_t>(i));
        const auto s = retromc::detail::hybrid_sample_impl(model, cfg, one, rng, nullptr);
        CHECK(s.accepted); // phi^+ == 0: nothing can reject
        stats.add(s.weight);
    }
    CHECK(std::abs(stats.mean() - target) < 4.0 * stats.std_error());
}

TEST_CASE("hybrid sampler: positivity, caching consistency, clamp counter") {
    const ModelParams p = asian_params();
    ZeroAlphaModel model(p);
    HybridConfig cfg;
    cfg.dyadic_depth = 4;
    const auto call = [&p](double v) { return std::max(v - p.strike, 0.0); };

    retromc::HybridDiagnostics diag;
    for (int i = 0; i < 20000; ++i) {
        RngStream rng(66, 0, static_cast<std::uint64_t>(i));
        const auto s = retromc::hybrid_price_sample(model, cfg, call, rng, &diag);
        CHECK(s.weight >= 0.0);
        CHECK(s.has_control_variate);
        CHECK(s.control_variate >= 0.0);
    }
    CHECK(diag.clamped_times >= 0);

    // trajectory value caching: repeated queries return identical values
    RngStream rng(67, 0, 0);
    retromc::HybridDiagnostics traj_diag;
    retromc::detail::HybridTrajectory<ZeroAlphaModel> traj(model, cfg, rng, &traj_diag);
    for (double t : {0.9, 0.41, 0.1, 0.030, 0.0007}) {
        const double first = traj.z_at(t);
        CHECK(traj.z_at(t) == first);
    }
    // queries below the numeric time floor are clamped and counted
    CHECK(traj_diag.clamped_times == 0);
    traj.z_at(1e-15);
    CHECK(traj_diag.clamped_times == 1);
}

namespace {

// stub whose positive part rejects every thinning point: acceptance requires
// an empty point set, which the inflated drift makes essentially impossible
class AlwaysRejectModel {
public:
    explicit AlwaysRejectModel(const ModelParams& p) : inner_(p) {}
    double phi(double t, double z) const { return inner_.phi(t, z); }
    double phi_pos(double, double) const { return 1e300; }
    double phi_neg(double t, double z) const { return inner_.phi_neg(t, z); }
    double exponent_a(double t, double z) const { return inner_.exponent_a(t, z); }
    double gamma() const { return 5.0; } // inflates the rectangle bounds
    double sigma() const { return inner_.sigma(); }
    const ModelParams& params() const { return inner_.params(); }
    double underlying(double z) const { return inner_.underlying(z); }

private:
    ZeroAlphaModel inner_;
};

} // namespace

TEST_CASE("restart-until-acceptance honours the retry cap") {
    const ModelParams p = asian_params();
    const auto one = [](double) { return 1.0; };

    // ordinary model: accepted samples with plausible retry counts
    ZeroAlphaModel model(p);
    HybridConfig cfg;
    cfg.dyadic_depth = 4;
    RngStream rng(74, 0, 0);
    long total_retries = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto s = retromc::hybrid_accepted_sample(model, cfg, one, rng);
        CHECK(s.accepted);
        // the negative-part product vanishes whenever a point lands where
        // phi > 0, so zero weights are legitimate on accepted trajectories
        CHECK(s.weight >= 0.0);
        total_retries += s.retries;
    }
    // acceptance is ~96-97%, so retries stay rare but nonzero
    CHECK(total_retries > 0);
    CHECK(total_retries < 400);

    // a trajectory that can never be accepted trips the divergence error
    const AlwaysRejectModel reject(p);
    HybridConfig tight;
    tight.dyadic_depth = 3;
    tight.retry_cap = 3;
    RngStream rng2(75, 0, 0);
    CHECK_THROWS_AS(retromc::detail::hybrid_accepted_impl(reject, tight, one, rng2, nullptr),
                    retromc::DivergenceError);
}

TEST_CASE("per-interval rejection probability is bounded by 1 - e^{-|I| M}") {
    const ModelParams p = asian_params();
    ZeroAlphaModel model(p);
    const double t_hi = p.maturity, t_lo = 0.5 * p.maturity; // interval j = 0
    const double s_lo = retromc::internal_clock(t_lo), s_hi = retromc::internal_clock(t_hi);

    RngStream rng(68, 0, 0);
    const int n = 100000;
    int rejected = 0;
    double bound_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double b_lo = std::sqrt(s_lo) * rng.normal();
        const double b_hi = b_lo + std::sqrt(s_hi - s_lo) * rng.normal();
        retromc::PathSkeleton sk(s_lo, b_lo);
        sk.append_knot(s_hi, b_hi);
        const auto bm = sk.record_bridge_minimum(rng);
        const double m_j = retromc::z_lower_bound(t_lo, t_hi, bm.min_value, p.gamma(), p.sigma);
        const double big_m = retromc::phi_plus_rectangle_bound(t_lo, t_hi, m_j, p.gamma(), p.sigma);
        bound_sum += 1.0 - std::exp(-(t_hi - t_lo) * big_m);

        const long count = rng.poisson((t_hi - t_lo) * big_m);
        for (long k = 0; k < count; ++k) {
            const double u = rng.uniform(t_lo, t_hi);
            const double v = rng.uniform(0.0, big_m);
            const double b = sk.value_at(retromc::internal_clock(u), rng);
            if (v <= model.phi_pos(u, retromc::z_from_b(b, u, p.gamma(), p.sigma))) {
                ++rejected;
                break;
            }
        }
    }
    const double reject_rate = static_cast<double>(rejected) / n;
    const double bound = bound_sum / n;
    CHECK(reject_rate <= bound + 4.0 * std::sqrt(bound * (1.0 - bound) / n));
}

TEST_CASE("lognormal control variate closed form") {
    const ModelParams p = asian_params();
    const double price = retromc::kv_control_variate_price(p, 100.0);

    // independent evaluation with a quadrature-based normal CDF
    const double v = p.sigma * std::sqrt(p.maturity / 3.0);
    const double d = (std::log(p.s0 / 100.0) + 0.5 * p.gamma() * p.maturity) / v;
    const double ref =
        p.s0 * std::exp((0.5 * p.gamma() + p.sigma * p.sigma / 6.0 - p.r) * p.maturity) *
            norm_cdf_quadrature(d + v) -
        100.0 * std::exp(-p.r * p.maturity) * norm_cdf_quadrature(d);
    CHECK(price == doctest::Approx(ref).epsilon(1e-10));
    CHECK(price == doctest::Approx(6.77).epsilon(0.003));
    CHECK(d == doctest::Approx(0.34641).epsilon(1e-4));

    // K -> 0+ limit
    const double tiny = retromc::kv_control_variate_price(p, 1e-9);
    CHECK(tiny == doctest::Approx(p.s0 * std::exp((0.5 * p.gamma() + p.sigma * p.sigma / 6.0 -
                                                   p.r) *
                                                  p.maturity))
                      .epsilon(1e-6));
    CHECK_THROWS_AS(retromc::kv_control_variate_price(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(retromc::kv_control_variate_price(p, -5.0), std::domain_error);

    // Monte Carlo consistency over exact draws of Z_T
    RngStream rng(69, 0, 0);
    const int n = 1000000;
    retromc::RunningStats stats;
    const double mu = 0.5 * p.gamma() * p.maturity;
    for (int i = 0; i < n; ++i) {
        const double z = mu + v * rng.normal();
        stats.add(std::exp(-p.r * p.maturity) * std::max(p.s0 * std::exp(z) - 100.0, 0.0));
    }
    CHECK(std::abs(stats.mean() - price) < 4.0 * stats.std_error());
}

TEST_CASE("control variate reduces the hybrid variance") {
    const ModelParams p = asian_params();
    ZeroAlphaModel model(p);
    HybridConfig cfg;
    const auto call = [&p](double v) { return std::max(v - p.strike, 0.0); };
    const double cv_ref = retromc::kv_control_variate_price(p, p.strike);

    retromc::PairedStats ps;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(70, 0, static_cast<std::uint64_t>(i));
        const auto s = retromc::hybrid_price_sample(model, cfg, call, rng);
        ps.add(s.weight, s.control_variate);
    }
    const auto raw = retromc::summarize_with_control(ps, cv_ref, false); // lambda not fitted
    const auto fitted = retromc::summarize_with_control(ps, cv_ref, true);
    const double lambda_free_var = ps.var_x();
    const double fitted_var = ps.var_x() - ps.cov() * ps.cov() / ps.var_y();
    CHECK(fitted_var <= lambda_free_var);
    CHECK(fitted.std_error <= raw.std_error + 1e-12);
    CHECK(fitted.std_error < std::sqrt(lambda_free_var / n));
}

TEST_CASE("heavy-tail diagnostic") {
    const ModelParams p = asian_params();
    HybridConfig cfg;

    RngStream rng0(71, 0, 0);
    const auto empty = retromc::heavy_tail_diagnostic(p, cfg, true, 0, rng0);
    CHECK(empty.n == 0);
    CHECK(empty.running_means.empty());

    RngStream rng1(72, 0, 0);
    const auto hybrid = retromc::heavy_tail_diagnostic(p, cfg, false, 40000, rng1);
    CHECK(hybrid.n == 40000);
    CHECK(hybrid.variance_ratio > 0.7);
    CHECK(hybrid.variance_ratio < 1.4);
    CHECK(!hybrid.running_means.empty());

    RngStream rng2(73, 0, 0);
    const auto naive = retromc::heavy_tail_diagnostic(p, cfg, true, 40000, rng2);
    CHECK(naive.n == 40000);
    CHECK(naive.max_abs_share > 0.0);
    CHECK(std::abs(naive.mean - 7.04) < 0.5);
    CHECK(!naive.running_means.empty());
}

TEST_CASE("model construction constraints") {
    ModelParams p = asian_params();
    p.alpha = 0.5;
    CHECK_THROWS_AS(ZeroAlphaModel{p}, retromc::ConfigError);
    p = asian_params();
    p.beta = 0.0;
    CHECK_THROWS_AS(ZeroAlphaModel{p}, retromc::ConfigError);
}
