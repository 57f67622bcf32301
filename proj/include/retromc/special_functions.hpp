#ifndef RETROMC_SPECIAL_FUNCTIONS_HPP
#define RETROMC_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <stdexcept>

namespace retromc {

// Standard normal CDF.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048490);
}

// Standard normal density.
inline double norm_pdf(double x) {
    return 0.3989422804014326779399460599343819 * std::exp(-0.5 * x * x);
}

// Principal branch of the Lambert W function on [0, +inf).
// Halley iteration on w*exp(w) = x, seeded with a log-based guess.
double lambert_w0(double x);

} // namespace retromc

#endif
