#include "retromc/params.hpp"

#include <cmath>

namespace retromc {

double ModelParams::discount_factor() const {
    return std::exp(-discount_rate() * maturity);
}

void ModelParams::validate() const {
    if (!(s0 > 0.0)) throw ConfigError("s0 must be > 0");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (!(maturity > 0.0)) throw ConfigError("t must be > 0");
    if (alpha < 0.0 || beta < 0.0) throw ConfigError("alpha and beta must be >= 0");
    if (alpha == 0.0 && beta == 0.0) throw ConfigError("alpha and beta cannot both be 0");
    if (strike < 0.0) throw ConfigError("strike must be >= 0");
}

} // namespace retromc
