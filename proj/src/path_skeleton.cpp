#include "retromc/path_skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace retromc {

namespace {

// Inverse-Gaussian IG(mu, lambda) draw, Michael-Schucany-Haas method.
double inverse_gaussian(double mu, double lambda, RngStream& rng) {
    const double v = rng.normal();
    const double y = v * v;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    if (rng.uniform() <= mu / (mu + x)) return x;
    return mu * mu / x;
}

} // namespace

BridgeMinimum bridge_minimum(double w_start, double w_end, double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw std::domain_error("bridge_minimum: dt must be > 0");

    const double e = rng.exponential();
    const double diff = w_start - w_end;
    const double m = 0.5 * (w_start + w_end - std::sqrt(diff * diff + 2.0 * dt * e));

    double c1 = (w_start - m) * (w_start - m) / (2.0 * dt);
    double c2 = (w_end - m) * (w_end - m) / (2.0 * dt);
    c1 = std::max(c1, 1e-300);
    c2 = std::max(c2, 1e-300);

    // theta = dt/(1+rho); rho follows a two-component GIG mixture that reduces
    // to inverse-Gaussian draws.
    const double s1 = std::sqrt(c1);
    const double s2 = std::sqrt(c2);
    double rho;
    if (rng.uniform() < s1 / (s1 + s2)) {
        rho = inverse_gaussian(std::sqrt(c2 / c1), 2.0 * c2, rng);
    } else {
        rho = 1.0 / inverse_gaussian(std::sqrt(c1 / c2), 2.0 * c1, rng);
    }
    double theta = dt / (1.0 + rho);
    const double eps = 1e-12 * dt;
    theta = std::min(std::max(theta, eps), dt - eps);
    return {m, theta};
}

PathSkeleton::PathSkeleton(double t0, double w0) {
    times_.push_back(t0);
    values_.push_back(w0);
}

void PathSkeleton::append_knot(double t, double w) {
    if (has_min_) throw std::logic_error("PathSkeleton: cannot append after minimum recorded");
    if (!(t > times_.back())) throw std::domain_error("PathSkeleton: knots must be appended in increasing time");
    times_.push_back(t);
    values_.push_back(w);
}

double PathSkeleton::extend_to(double t, RngStream& rng) {
    if (has_min_) throw std::logic_error("PathSkeleton: cannot extend after minimum recorded");
    if (!(t > times_.back())) throw std::domain_error("PathSkeleton: extension time must exceed the span");
    const double w = values_.back() + std::sqrt(t - times_.back()) * rng.normal();
    times_.push_back(t);
    values_.push_back(w);
    return w;
}

const BridgeMinimum& PathSkeleton::record_bridge_minimum(RngStream& rng) {
    if (has_min_ || times_.size() != 2)
        throw std::logic_error("PathSkeleton: minimum requires a fresh two-knot bridge");
    const double dt = times_[1] - times_[0];
    last_draw_ = bridge_minimum(values_[0], values_[1], dt, rng);
    record_minimum(times_[0] + last_draw_.min_time_offset, last_draw_.min_value);
    return last_draw_;
}

void PathSkeleton::record_minimum(double t_min, double min_value) {
    if (has_min_ || times_.size() != 2)
        throw std::logic_error("PathSkeleton: minimum requires a fresh two-knot bridge");
    if (!(t_min > times_[0] && t_min < times_[1]))
        throw std::domain_error("PathSkeleton: minimum time outside the span");
    if (min_value > std::min(values_[0], values_[1]))
        throw std::domain_error("PathSkeleton: minimum above an endpoint");

    min_time_ = t_min;
    min_value_ = min_value;
    has_min_ = true;

    legs_[0].length = t_min - times_[0];
    legs_[0].eta = values_[0] - min_value;
    legs_[1].length = times_[1] - t_min;
    legs_[1].eta = values_[1] - min_value;
    for (auto& leg : legs_) {
        leg.s = {0.0, leg.length};
        leg.comps = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    }
    insert_knot(t_min, min_value);
}

std::optional<double> PathSkeleton::min_value() const {
    if (!has_min_) return std::nullopt;
    return min_value_;
}

std::optional<double> PathSkeleton::min_time() const {
    if (!has_min_) return std::nullopt;
    return min_time_;
}

void PathSkeleton::insert_knot(double t, double w) {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const auto idx = static_cast<std::size_t>(it - times_.begin());
    times_.insert(it, t);
    values_.insert(values_.begin() + static_cast<std::ptrdiff_t>(idx), w);
}

double PathSkeleton::value_at(double t, RngStream& rng) {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && *it == t) {
        return values_[static_cast<std::size_t>(it - times_.begin())];
    }
    if (t < times_.front() || t > times_.back())
        throw std::domain_error("PathSkeleton: fill time outside the span");
    return has_min_ ? fill_with_minimum(t, rng) : fill_plain(t, rng);
}

double PathSkeleton::fill_plain(double t, RngStream& rng) {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto r = static_cast<std::size_t>(it - times_.begin());
    const std::size_t l = r - 1;
    const double tl = times_[l], tr = times_[r];
    const double wl = values_[l], wr = values_[r];
    const double span = tr - tl;
    const double mean = wl + (t - tl) / span * (wr - wl);
    const double var = (t - tl) * (tr - t) / span;
    const double w = mean + std::sqrt(var) * rng.normal();
    insert_knot(t, w);
    return w;
}

double PathSkeleton::BesselLeg::radial_at(double s_query, RngStream& rng) {
    const auto it = std::lower_bound(s.begin(), s.end(), s_query);
    const auto idx = static_cast<std::size_t>(it - s.begin());
    if (it != s.end() && *it == s_query) {
        const auto& c = comps[idx];
        const double lin = eta * s_query / length + c[0];
        return std::sqrt(lin * lin + c[1] * c[1] + c[2] * c[2]);
    }
    const std::size_t r = idx;
    const std::size_t l = r - 1;
    const double sl = s[l], sr = s[r];
    const double span = sr - sl;
    const double frac = (s_query - sl) / span;
    const double sd = std::sqrt((s_query - sl) * (sr - s_query) / span);
    std::array<double, 3> c;
    for (int i = 0; i < 3; ++i) {
        const double mean = comps[l][i] + frac * (comps[r][i] - comps[l][i]);
        c[i] = mean + sd * rng.normal();
    }
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(idx), s_query);
    comps.insert(comps.begin() + static_cast<std::ptrdiff_t>(idx), c);
    const double lin = eta * s_query / length + c[0];
    return std::sqrt(lin * lin + c[1] * c[1] + c[2] * c[2]);
}

double PathSkeleton::fill_with_minimum(double t, RngStream& rng) {
    double w;
    if (t < min_time_) {
        // left leg runs time-reversed from the minimum
        w = min_value_ + legs_[0].radial_at(min_time_ - t, rng);
    } else {
        w = min_value_ + legs_[1].radial_at(t - min_time_, rng);
    }
    insert_knot(t, w);
    return w;
}

std::vector<double> PathSkeleton::fill(const std::vector<double>& ts, RngStream& rng) {
    std::vector<double> out;
    out.reserve(ts.size());
    for (const double t : ts) out.push_back(value_at(t, rng));
    return out;
}

std::vector<double> fill_conditioned(PathSkeleton& skeleton, const std::vector<double>& new_times,
                                     RngStream& rng) {
    return skeleton.fill(new_times, rng);
}

} // namespace retromc
