#ifndef RETROMC_PATH_SKELETON_HPP
#define RETROMC_PATH_SKELETON_HPP

#include <array>
#include <optional>
#include <vector>

#include "retromc/rng.hpp"

namespace retromc {

struct BridgeMinimum {
    double min_value;
    double min_time_offset; // in (0, dt)
};

// Joint draw of (minimum, argmin) for a Brownian bridge from w_start to w_end
// over duration dt. The minimum comes from inverting the reflection-principle
// CDF; the argmin from the inverse-Gaussian mixture of its conditional law.
BridgeMinimum bridge_minimum(double w_start, double w_end, double dt, RngStream& rng);

// Finite skeleton of a Brownian (or auxiliary) path. Knots are (time, value)
// pairs; an optional recorded minimum splits the span into two Bessel(3)
// bridge legs so later fills respect the conditioning. The three Gaussian
// components backing each leg are cached so repeated fills stay consistent.
class PathSkeleton {
public:
    PathSkeleton(double t0, double w0);

    // Append a knot to the right of the current span (value chosen by caller).
    void append_knot(double t, double w);

    // Extend to t > back() with a free Brownian increment. Not allowed once a
    // minimum has been recorded.
    double extend_to(double t, RngStream& rng);

    // Draw and record the bridge minimum. Requires exactly two knots and no
    // minimum recorded yet.
    const BridgeMinimum& record_bridge_minimum(RngStream& rng);

    // Record a given minimum (used by tests and oracles).
    void record_minimum(double t_min, double min_value);

    // Value at time t inside the span, drawn from the correct conditional law
    // and cached as a new knot. Existing knot times return the stored value.
    double value_at(double t, RngStream& rng);

    std::vector<double> fill(const std::vector<double>& ts, RngStream& rng);

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    std::optional<double> min_value() const;
    std::optional<double> min_time() const;
    double front_time() const { return times_.front(); }
    double back_time() const { return times_.back(); }
    double front_value() const { return values_.front(); }
    double back_value() const { return values_.back(); }
    std::size_t size() const { return times_.size(); }

private:
    struct BesselLeg {
        double length = 0.0;
        double eta = 0.0; // endpoint height above the minimum
        std::vector<double> s;                      // local times, sorted
        std::vector<std::array<double, 3>> comps;   // bridge components at s

        double radial_at(double s_query, RngStream& rng);
    };

    void insert_knot(double t, double w);
    double fill_plain(double t, RngStream& rng);
    double fill_with_minimum(double t, RngStream& rng);

    std::vector<double> times_;
    std::vector<double> values_;
    bool has_min_ = false;
    double min_time_ = 0.0;
    double min_value_ = 0.0;
    BridgeMinimum last_draw_{0.0, 0.0};
    std::array<BesselLeg, 2> legs_; // 0: left of the min (time-reversed), 1: right
};

// Spec-level free function: values from the conditional law at new_times.
std::vector<double> fill_conditioned(PathSkeleton& skeleton,
                                     const std::vector<double>& new_times,
                                     RngStream& rng);

} // namespace retromc

#endif
