#ifndef RETROMC_STATS_HPP
#define RETROMC_STATS_HPP

#include <cmath>
#include <cstdint>

#include "retromc/params.hpp"

namespace retromc {

// Compensated (Neumaier) accumulator.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Streaming first/second moments with deterministic merge (used for the
// per-worker reduction).
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);

    long count() const { return n_; }
    double mean() const;
    double variance() const; // unbiased
    double std_error() const;

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Paired accumulator for (weight, companion) draws: control-variate
// adjustments and the self-normalised ratio both need the cross moment.
class PairedStats {
public:
    void add(double x, double y);
    void merge(const PairedStats& other);

    long count() const { return n_; }
    double mean_x() const;
    double mean_y() const;
    double var_x() const;
    double var_y() const;
    double cov() const;

private:
    long n_ = 0;
    double mean_x_ = 0.0, mean_y_ = 0.0;
    double m2x_ = 0.0, m2y_ = 0.0, mxy_ = 0.0;
};

// mean +/- 1.96 SE summary
RunResult summarize(const RunningStats& stats);

// Control-variate adjusted summary: price = mean_x - lambda (mean_y - ey_exact).
// If fit_lambda, lambda = cov/var_y; otherwise lambda = 1.
RunResult summarize_with_control(const PairedStats& stats, double ey_exact, bool fit_lambda);

// Self-normalised ratio mean_x/mean_y with delta-method standard error.
RunResult summarize_ratio(const PairedStats& stats);

} // namespace retromc

#endif
