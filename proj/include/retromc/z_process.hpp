#ifndef RETROMC_Z_PROCESS_HPP
#define RETROMC_Z_PROCESS_HPP

#include <vector>

#include "retromc/path_skeleton.hpp"
#include "retromc/rng.hpp"

namespace retromc {

// Internal clock of the auxiliary Gaussian process: Z_t = (sigma/t) B_{t^3/3} + (gamma/2) t.
inline double internal_clock(double t) { return t * t * t / 3.0; }

inline double z_from_b(double b, double t, double gamma, double sigma) {
    return sigma / t * b + 0.5 * gamma * t;
}

// Values of Z at the given times (all > 0), using a skeleton of the standard
// Brownian motion B in the internal clock. New times trigger conditioned
// fill-in of B at s = t^3/3; times beyond the stored span extend B freely.
std::vector<double> z_process_values(PathSkeleton& b_skeleton, const std::vector<double>& times,
                                     double gamma, double sigma, RngStream& rng);

// Convenience wrapper owning the B skeleton, anchored at (0, 0).
class ZPath {
public:
    ZPath(double gamma, double sigma) : b_(0.0, 0.0), gamma_(gamma), sigma_(sigma) {}

    double at(double t, RngStream& rng);

    PathSkeleton& b_skeleton() { return b_; }

private:
    PathSkeleton b_;
    double gamma_;
    double sigma_;
};

} // namespace retromc

#endif
