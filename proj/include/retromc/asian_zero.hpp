#ifndef RETROMC_ASIAN_ZERO_HPP
#define RETROMC_ASIAN_ZERO_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "retromc/params.hpp"
#include "retromc/path_skeleton.hpp"
#include "retromc/rng.hpp"
#include "retromc/z_process.hpp"

namespace retromc {

// Time-dependent potential of the alpha = 0 change of variables,
//   phi(t,z) = (e^{-z}-1+z-z^2/2)/(sigma^2 t^2) + (1-e^{-z})/(2t)
//            + ((e^{-z}-1+z)/(sigma^2 t)) ((e^{-z}-1+z)/(2t) + gamma - z/t).
// Near z = 0 the numerators cancel catastrophically; below |z| = 1e-4 the
// evaluation switches to Taylor forms.
double phi_t_z(double t, double z, double gamma, double sigma);
double phi_plus(double t, double z, double gamma, double sigma);
double phi_minus(double t, double z, double gamma, double sigma);

// Girsanov exponent A(t,z) = (1 - z + z^2/2 - e^{-z})/(sigma^2 t).
double weight_exponent(double t, double z, double sigma);

// Uniform bound for phi^+ on [t_l, t_u] x [m_j, +inf):
// branch (a) covers z >= 0, branch (b) covers z in [min(m_j,0), 0]; both are
// decreasing in t so they are evaluated at t_l.
double phi_plus_rectangle_bound(double t_l, double t_u, double m_j, double gamma, double sigma);

// Lower bound for Z on [t_l, t_u] given a lower bound m_B for B on the
// matching internal-clock interval.
double z_lower_bound(double t_l, double t_u, double m_b, double gamma, double sigma);

// Intensity kappa * t^{-1/2-eta} dominating phi^+(t, Z_t) near t = 0
// (valid in a random neighbourhood; used unconditionally on [0, eps], which
// is what makes the hybrid method pseudo-exact).
struct TailIntensity {
    double kappa = 0.0;
    double exponent = 0.0; // -1/2 - eta

    double value(double t) const { return kappa * std::pow(t, exponent); }
    double cumulative(double eps) const {
        const double p = 1.0 + exponent; // = 1/2 - eta > 0
        return kappa * std::pow(eps, p) / p;
    }
    double inverse_cdf_time(double eps, double u) const {
        const double p = 1.0 + exponent;
        return eps * std::pow(u, 1.0 / p);
    }
};
TailIntensity small_time_tail_intensity(double eta, double sigma, double gamma);

struct HybridConfig {
    int dyadic_depth = 10;  // J; threshold eps = T / 2^{J+1}
    double eta = 0.1;       // in (0, 1/4)
    double c_p = 1.0;       // Poisson rate of the negative-part product
    long retry_cap = 10'000'000;

    void validate() const;
};

struct HybridDiagnostics {
    long clamped_times = 0; // queries below the numeric time floor
};

class ZeroAlphaModel {
public:
    explicit ZeroAlphaModel(const ModelParams& params);

    double phi(double t, double z) const { return phi_t_z(t, z, gamma_, params_.sigma); }
    double phi_pos(double t, double z) const { return phi_plus(t, z, gamma_, params_.sigma); }
    double phi_neg(double t, double z) const { return phi_minus(t, z, gamma_, params_.sigma); }
    double exponent_a(double t, double z) const { return weight_exponent(t, z, params_.sigma); }

    double gamma() const { return gamma_; }
    double sigma() const { return params_.sigma; }
    const ModelParams& params() const { return params_; }
    // underlying value beta int S = beta T S0 e^{Z_T}
    double underlying(double z_terminal) const {
        return params_.beta * params_.maturity * params_.s0 * std::exp(z_terminal);
    }

private:
    ModelParams params_;
    double gamma_;
};

// One attempt of the hybrid pseudo-exact estimator. A rejected trajectory
// yields weight 0 with accepted = false; the plain mean over attempts is the
// price estimate. The lognormal control variate e^{-rT}(S0 e^{Z_T} - K)+ is
// recorded on every attempt.
EstimatorSample hybrid_price_sample(const ZeroAlphaModel& model, const HybridConfig& config,
                                    const UnderlyingPayoff& payoff, RngStream& rng,
                                    HybridDiagnostics* diag = nullptr);

// Restart-until-acceptance variant for consumers that need an accepted
// trajectory (retries recorded; DivergenceError past config.retry_cap). Its
// weight is conditioned on acceptance, so the price estimator remains the
// per-attempt mean above, not the mean of these.
EstimatorSample hybrid_accepted_sample(const ZeroAlphaModel& model, const HybridConfig& config,
                                       const UnderlyingPayoff& payoff, RngStream& rng,
                                       HybridDiagnostics* diag = nullptr);

// Closed form for E[e^{-rT}(S0 e^{Z_T} - K)+] with Z_T ~ N(gamma T/2, sigma^2 T/3).
double kv_control_variate_price(const ModelParams& params, double strike);

struct HeavyTailReport {
    long n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double half_variance = 0.0;
    double variance_ratio = 0.0;     // full-sample over first-half variance
    double max_abs_share = 0.0;      // max |w| / sum |w|
    std::vector<double> running_means;
};

// Runs either the naive full-signed-phi product estimator (heavy-tailed by
// construction, never used for pricing) or the hybrid one, and reports
// stability statistics.
HeavyTailReport heavy_tail_diagnostic(const ModelParams& params, const HybridConfig& config,
                                      bool naive, long n, RngStream& rng);

namespace detail {

// Shared trajectory machinery, templated so tests can inject a model with a
// forced potential.
template <class Model>
class HybridTrajectory {
public:
    HybridTrajectory(const Model& model, const HybridConfig& config, RngStream& rng,
                     HybridDiagnostics* diag)
        : model_(model), rng_(rng), diag_(diag) {
        const double t_end = model.params().maturity;
        const int j_max = config.dyadic_depth;
        knot_times_.resize(static_cast<std::size_t>(j_max) + 2);
        for (int j = 0; j <= j_max + 1; ++j) {
            knot_times_[static_cast<std::size_t>(j)] = t_end / std::pow(2.0, j);
        }
        eps_ = knot_times_.back();
        floor_ = 1e-12 * t_end;

        // B at the dyadic internal-clock knots, simulated forward from 0
        std::vector<double> s(knot_times_.size());
        std::vector<double> b(knot_times_.size());
        for (std::size_t i = 0; i < knot_times_.size(); ++i)
            s[i] = internal_clock(knot_times_[i]);
        double prev_s = 0.0, prev_b = 0.0;
        for (std::size_t i = knot_times_.size(); i-- > 0;) {
            b[i] = prev_b + std::sqrt(s[i] - prev_s) * rng.normal();
            prev_s = s[i];
            prev_b = b[i];
        }
        z_terminal_ = z_from_b(b[0], knot_times_[0], model.gamma(), model.sigma());

        segments_.reserve(static_cast<std::size_t>(j_max) + 1);
        for (int j = 0; j <= j_max; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            Segment seg{PathSkeleton(s[ju + 1], b[ju + 1]), knot_times_[ju + 1], knot_times_[ju],
                        0.0, 0.0};
            seg.skeleton.append_knot(s[ju], b[ju]);
            const BridgeMinimum bm = seg.skeleton.record_bridge_minimum(rng);
            seg.z_min = z_lower_bound(seg.t_lo, seg.t_hi, bm.min_value, model.gamma(),
                                      model.sigma());
            seg.phi_bound = phi_plus_rectangle_bound(seg.t_lo, seg.t_hi, seg.z_min, model.gamma(),
                                         model.sigma());
            segments_.push_back(std::move(seg));
        }
        tail_ = std::make_unique<PathSkeleton>(0.0, 0.0);
        tail_->append_knot(s[knot_times_.size() - 1], b[knot_times_.size() - 1]);
    }

    double z_terminal() const { return z_terminal_; }
    double threshold() const { return eps_; }
    long knots() const {
        long total = static_cast<long>(tail_->size());
        for (const auto& seg : segments_) total += static_cast<long>(seg.skeleton.size());
        return total;
    }

    double z_at(double t) {
        if (t < floor_) {
            if (diag_) ++diag_->clamped_times;
            t = floor_;
        }
        const double s = internal_clock(t);
        double b;
        if (t < eps_) {
            b = tail_->value_at(std::min(s, tail_->back_time()), rng_);
        } else {
            Segment& seg = segment_for(t);
            const double s_lo = internal_clock(seg.t_lo);
            const double s_hi = internal_clock(seg.t_hi);
            b = seg.skeleton.value_at(std::min(std::max(s, s_lo), s_hi), rng_);
        }
        return z_from_b(b, t, model_.gamma(), model_.sigma());
    }

    // homogeneous thinning on each dyadic rectangle, then inhomogeneous
    // thinning on the tail. Returns false if the trajectory is rejected.
    bool accept(const TailIntensity& tail_intensity) {
        for (Segment& seg : segments_) {
            const double rate = (seg.t_hi - seg.t_lo) * seg.phi_bound;
            const long n = rng_.poisson(rate);
            for (long i = 0; i < n; ++i) {
                const double u = rng_.uniform(seg.t_lo, seg.t_hi);
                const double v = rng_.uniform(0.0, seg.phi_bound);
                if (v <= model_.phi_pos(u, z_at(u))) return false;
            }
        }
        const long n_tail = rng_.poisson(tail_intensity.cumulative(eps_));
        for (long i = 0; i < n_tail; ++i) {
            double u = tail_intensity.inverse_cdf_time(eps_, rng_.uniform_pos());
            if (u < floor_) {
                if (diag_) ++diag_->clamped_times;
                u = floor_;
            }
            const double v = rng_.uniform(0.0, tail_intensity.value(u));
            if (v <= model_.phi_pos(u, z_at(u))) return false;
        }
        return true;
    }

    // the negative-part Poisson product over U_i ~ U[0, T]
    double negative_part_product(double c_p, long* count) {
        const double t_end = model_.params().maturity;
        const long n = rng_.poisson(c_p * t_end);
        if (count) *count = n;
        double product = 1.0;
        for (long i = 0; i < n; ++i) {
            const double u = rng_.uniform(0.0, t_end);
            product *= model_.phi_neg(u, z_at(u)) / c_p;
            if (product == 0.0) break;
        }
        return product;
    }

private:
    struct Segment {
        PathSkeleton skeleton; // B in the internal clock, minimum recorded
        double t_lo, t_hi;     // original-clock interval
        double z_min;          // certified lower bound for Z on the interval
        double phi_bound;      // certified upper bound for phi^+ there
    };

    Segment& segment_for(double t) {
        const double t_end = knot_times_[0];
        int j = static_cast<int>(std::floor(std::log2(t_end / t)));
        j = std::max(0, std::min(j, static_cast<int>(segments_.size()) - 1));
        while (j > 0 && t > segments_[static_cast<std::size_t>(j)].t_hi) --j;
        while (j + 1 < static_cast<int>(segments_.size()) &&
               t < segments_[static_cast<std::size_t>(j)].t_lo)
            ++j;
        return segments_[static_cast<std::size_t>(j)];
    }

    const Model& model_;
    RngStream& rng_;
    HybridDiagnostics* diag_;
    std::vector<double> knot_times_; // T/2^j, j = 0..J+1
    std::vector<Segment> segments_;
    std::unique_ptr<PathSkeleton> tail_;
    double eps_ = 0.0;
    double floor_ = 0.0;
    double z_terminal_ = 0.0;
};

template <class Model>
EstimatorSample hybrid_sample_impl(const Model& model, const HybridConfig& config,
                                   const UnderlyingPayoff& payoff, RngStream& rng,
                                   HybridDiagnostics* diag) {
    config.validate();
    const ModelParams& p = model.params();
    const TailIntensity tail = small_time_tail_intensity(config.eta, model.sigma(), model.gamma());

    HybridTrajectory<Model> traj(model, config, rng, diag);

    EstimatorSample s;
    s.control_variate =
        p.discount_factor() * std::max(p.s0 * std::exp(traj.z_terminal()) - p.strike, 0.0);
    s.has_control_variate = true;
    s.skeleton_size = traj.knots();

    if (!traj.accept(tail)) {
        s.accepted = false;
        s.weight = 0.0;
        s.base_weight = 0.0;
        return s;
    }

    long count = 0;
    const double product = traj.negative_part_product(config.c_p, &count);
    const double z_t = traj.z_terminal();
    const double shared = std::exp(model.exponent_a(p.maturity, z_t)) *
                          std::exp(config.c_p * p.maturity) * product;
    s.accepted = true;
    s.poisson_count = count;
    s.weight = p.discount_factor() * payoff(model.underlying(z_t)) * shared;
    s.base_weight = shared;
    if (!std::isfinite(s.weight)) throw ModelError("hybrid sample: non-finite weight");
    return s;
}

template <class Model>
EstimatorSample hybrid_accepted_impl(const Model& model, const HybridConfig& config,
                                     const UnderlyingPayoff& payoff, RngStream& rng,
                                     HybridDiagnostics* diag) {
    for (long attempt = 0; attempt <= config.retry_cap; ++attempt) {
        EstimatorSample s = hybrid_sample_impl(model, config, payoff, rng, diag);
        if (s.accepted) {
            s.retries = attempt;
            return s;
        }
    }
    throw DivergenceError("hybrid_accepted_sample: retry cap exceeded");
}

} // namespace detail

} // namespace retromc

#endif
