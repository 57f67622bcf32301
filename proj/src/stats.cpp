#include "retromc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace retromc {

void RunningStats::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double d = other.mean_ - mean_;
    const double nt = na + nb;
    mean_ += d * nb / nt;
    m2_ += other.m2_ + d * d * na * nb / nt;
    n_ += other.n_;
}

double RunningStats::mean() const {
    if (n_ == 0) throw std::runtime_error("RunningStats: empty");
    return mean_;
}

double RunningStats::variance() const {
    if (n_ < 2) throw std::runtime_error("RunningStats: need >= 2 samples");
    return m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::std_error() const {
    return std::sqrt(variance() / static_cast<double>(n_));
}

void PairedStats::add(double x, double y) {
    ++n_;
    const double dx = x - mean_x_;
    const double dy = y - mean_y_;
    const double inv = 1.0 / static_cast<double>(n_);
    mean_x_ += dx * inv;
    mean_y_ += dy * inv;
    m2x_ += dx * (x - mean_x_);
    m2y_ += dy * (y - mean_y_);
    mxy_ += dx * (y - mean_y_);
}

void PairedStats::merge(const PairedStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double nt = na + nb;
    const double dx = other.mean_x_ - mean_x_;
    const double dy = other.mean_y_ - mean_y_;
    mean_x_ += dx * nb / nt;
    mean_y_ += dy * nb / nt;
    m2x_ += other.m2x_ + dx * dx * na * nb / nt;
    m2y_ += other.m2y_ + dy * dy * na * nb / nt;
    mxy_ += other.mxy_ + dx * dy * na * nb / nt;
    n_ += other.n_;
}

double PairedStats::mean_x() const {
    if (n_ == 0) throw std::runtime_error("PairedStats: empty");
    return mean_x_;
}

double PairedStats::mean_y() const {
    if (n_ == 0) throw std::runtime_error("PairedStats: empty");
    return mean_y_;
}

double PairedStats::var_x() const {
    if (n_ < 2) throw std::runtime_error("PairedStats: need >= 2 samples");
    return m2x_ / static_cast<double>(n_ - 1);
}

double PairedStats::var_y() const {
    if (n_ < 2) throw std::runtime_error("PairedStats: need >= 2 samples");
    return m2y_ / static_cast<double>(n_ - 1);
}

double PairedStats::cov() const {
    if (n_ < 2) throw std::runtime_error("PairedStats: need >= 2 samples");
    return mxy_ / static_cast<double>(n_ - 1);
}

RunResult summarize(const RunningStats& stats) {
    if (stats.count() < 2) throw std::runtime_error("summarize: need >= 2 samples");
    RunResult r;
    r.n = stats.count();
    r.price = stats.mean();
    r.std_error = stats.std_error();
    r.ci_lo = r.price - 1.96 * r.std_error;
    r.ci_hi = r.price + 1.96 * r.std_error;
    return r;
}

RunResult summarize_with_control(const PairedStats& stats, double ey_exact, bool fit_lambda) {
    if (stats.count() < 2) throw std::runtime_error("summarize_with_control: need >= 2 samples");
    const double n = static_cast<double>(stats.count());
    double lambda = 1.0;
    if (fit_lambda) {
        const double vy = stats.var_y();
        lambda = vy > 0.0 ? stats.cov() / vy : 0.0;
    }
    RunResult r;
    r.n = stats.count();
    r.price = stats.mean_x() - lambda * (stats.mean_y() - ey_exact);
    const double var = stats.var_x() - 2.0 * lambda * stats.cov() + lambda * lambda * stats.var_y();
    r.std_error = std::sqrt(std::max(var, 0.0) / n);
    r.ci_lo = r.price - 1.96 * r.std_error;
    r.ci_hi = r.price + 1.96 * r.std_error;
    return r;
}

RunResult summarize_ratio(const PairedStats& stats) {
    if (stats.count() < 2) throw std::runtime_error("summarize_ratio: need >= 2 samples");
    const double my = stats.mean_y();
    if (my == 0.0) throw std::runtime_error("summarize_ratio: zero denominator");
    const double n = static_cast<double>(stats.count());
    const double ratio = stats.mean_x() / my;
    const double var = (stats.var_x() - 2.0 * ratio * stats.cov() + ratio * ratio * stats.var_y()) /
                       (my * my);
    RunResult r;
    r.n = stats.count();
    r.price = ratio;
    r.std_error = std::sqrt(std::max(var, 0.0) / n);
    r.ci_lo = r.price - 1.96 * r.std_error;
    r.ci_hi = r.price + 1.96 * r.std_error;
    return r;
}

} // namespace retromc
