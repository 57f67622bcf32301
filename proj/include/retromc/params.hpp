#ifndef RETROMC_PARAMS_HPP
#define RETROMC_PARAMS_HPP

#include <functional>
#include <optional>
#include <stdexcept>

namespace retromc {

// payoff on the underlying value alpha S_T + beta int_0^T S_t dt
using UnderlyingPayoff = std::function<double(double)>;

// Black-Scholes and payoff constants. The drift gamma = r - delta - sigma^2/2
// is derived unless overridden (the floating-strike reduction replaces it by
// r - delta + sigma^2/2 and discounts at the dividend rate).
struct ModelParams {
    double s0 = 100.0;
    double r = 0.05;
    double dividend = 0.0;
    double sigma = 0.3;
    double maturity = 1.0;
    double alpha = 0.6;
    double beta = 0.4;
    double strike = 100.0;
    std::optional<double> gamma_override;
    std::optional<double> discount_override;

    double gamma() const {
        return gamma_override ? *gamma_override : r - dividend - 0.5 * sigma * sigma;
    }
    double discount_rate() const { return discount_override ? *discount_override : r; }
    double discount_factor() const;

    void validate() const;
};

struct EstimatorSample {
    double weight = 0.0;       // discounted payoff contribution
    double base_weight = 0.0;  // same estimator with payoff == 1, undiscounted
    bool accepted = true;      // rejection-based methods only
    long poisson_count = 0;
    long retries = 0;
    long skeleton_size = 0;
    double control_variate = 0.0;
    bool has_control_variate = false;
};

struct RunResult {
    double price = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::optional<double> acceptance_rate;
    long n = 0;
    double wall_seconds = 0.0;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace retromc

#endif
