#ifndef RETROMC_EXPERIMENT_HPP
#define RETROMC_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "retromc/asian_zero.hpp"
#include "retromc/params.hpp"

namespace retromc {

enum class Method { TrapKV, Exact, UEBound, UEFree, Hybrid };

Method method_from_string(const std::string& name);
std::string method_to_string(Method method);

// Declarative description of one pricing run. Populated from a flat
// key=value config file plus CLI flag overrides.
struct ExperimentConfig {
    Method method = Method::Exact;
    ModelParams params;
    std::string payoff = "call"; // call | put
    long samples = 100000;
    int grid_steps = 50;          // trap-kv
    double ue_cp = 0.0;           // 0 -> 1/T
    double ue_c = 0.0;            // 0 -> 1/T
    HybridConfig hybrid;
    bool hybrid_control_variate = true;
    bool fit_lambda = false; // trap-kv control coefficient; 1 by default
    std::uint64_t seed = 12345;
    int workers = 0; // 0 -> hardware concurrency
    std::string csv_path;

    UnderlyingPayoff make_payoff() const;
    void validate() const;

    // key=value assignment; context names the source (file:line or flag)
    void assign(const std::string& key, const std::string& value, const std::string& context);

    static ExperimentConfig from_file(const std::string& path);
};

} // namespace retromc

#endif
