#include "retromc/z_process.hpp"

#include <stdexcept>

namespace retromc {

namespace {

double b_value(PathSkeleton& b, double s, RngStream& rng) {
    if (s > b.back_time()) return b.extend_to(s, rng);
    return b.value_at(s, rng);
}

} // namespace

std::vector<double> z_process_values(PathSkeleton& b_skeleton, const std::vector<double>& times,
                                     double gamma, double sigma, RngStream& rng) {
    std::vector<double> out;
    out.reserve(times.size());
    for (const double t : times) {
        if (!(t > 0.0)) throw std::domain_error("z_process_values: time must be > 0");
        const double b = b_value(b_skeleton, internal_clock(t), rng);
        out.push_back(z_from_b(b, t, gamma, sigma));
    }
    return out;
}

double ZPath::at(double t, RngStream& rng) {
    if (!(t > 0.0)) throw std::domain_error("ZPath: time must be > 0");
    const double b = b_value(b_, internal_clock(t), rng);
    return z_from_b(b, t, gamma_, sigma_);
}

} // namespace retromc
