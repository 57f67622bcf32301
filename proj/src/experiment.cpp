#include "retromc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace retromc {

Method method_from_string(const std::string& name) {
    if (name == "trap-kv") return Method::TrapKV;
    if (name == "exact") return Method::Exact;
    if (name == "ue-bound") return Method::UEBound;
    if (name == "ue-free") return Method::UEFree;
    if (name == "hybrid") return Method::Hybrid;
    throw ConfigError("unknown method '" + name +
                      "' (expected trap-kv|exact|ue-bound|ue-free|hybrid)");
}

std::string method_to_string(Method method) {
    switch (method) {
        case Method::TrapKV: return "trap-kv";
        case Method::Exact: return "exact";
        case Method::UEBound: return "ue-bound";
        case Method::UEFree: return "ue-free";
        case Method::Hybrid: return "hybrid";
    }
    return "?";
}

UnderlyingPayoff ExperimentConfig::make_payoff() const {
    const double strike = params.strike;
    if (payoff == "call") {
        return [strike](double v) { return std::max(v - strike, 0.0); };
    }
    if (payoff == "put") {
        return [strike](double v) { return std::max(strike - v, 0.0); };
    }
    throw ConfigError("unknown payoff '" + payoff + "' (expected call|put)");
}

void ExperimentConfig::validate() const {
    params.validate();
    make_payoff();
    if (samples < 2) throw ConfigError("samples must be >= 2");
    if (workers < 0) throw ConfigError("workers must be >= 0");
    switch (method) {
        case Method::TrapKV:
            if (grid_steps < 1) throw ConfigError("grid_m must be >= 1 for trap-kv");
            break;
        case Method::Exact:
        case Method::UEBound:
        case Method::UEFree:
            if (!(params.alpha > 0.0))
                throw ConfigError(method_to_string(method) + " requires alpha > 0");
            if (method == Method::UEFree && ue_cp < 0.0) throw ConfigError("ue_cp must be >= 0");
            break;
        case Method::Hybrid:
            if (params.alpha != 0.0) throw ConfigError("hybrid requires alpha = 0");
            hybrid.validate();
            break;
    }
}

namespace {

double parse_double(const std::string& value, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(context + ": cannot parse number '" + value + "'");
    }
}

long parse_long(const std::string& value, const std::string& context) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(context + ": cannot parse integer '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const std::string& context) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw ConfigError(context + ": cannot parse boolean '" + value + "'");
}

} // namespace

void ExperimentConfig::assign(const std::string& key, const std::string& value,
                              const std::string& context) {
    if (key == "method") {
        try {
            method = method_from_string(value);
        } catch (const ConfigError& e) {
            throw ConfigError(context + ": " + e.what());
        }
    } else if (key == "s0") {
        params.s0 = parse_double(value, context);
    } else if (key == "r") {
        params.r = parse_double(value, context);
    } else if (key == "delta") {
        params.dividend = parse_double(value, context);
    } else if (key == "sigma") {
        params.sigma = parse_double(value, context);
    } else if (key == "t") {
        params.maturity = parse_double(value, context);
    } else if (key == "alpha") {
        params.alpha = parse_double(value, context);
    } else if (key == "beta") {
        params.beta = parse_double(value, context);
    } else if (key == "strike") {
        params.strike = parse_double(value, context);
    } else if (key == "payoff") {
        payoff = value;
    } else if (key == "samples") {
        samples = parse_long(value, context);
    } else if (key == "grid_m") {
        grid_steps = static_cast<int>(parse_long(value, context));
    } else if (key == "ue_cp") {
        ue_cp = parse_double(value, context);
    } else if (key == "ue_c") {
        ue_c = parse_double(value, context);
    } else if (key == "hybrid_j") {
        hybrid.dyadic_depth = static_cast<int>(parse_long(value, context));
    } else if (key == "hybrid_eta") {
        hybrid.eta = parse_double(value, context);
    } else if (key == "hybrid_cp") {
        hybrid.c_p = parse_double(value, context);
    } else if (key == "hybrid_cv") {
        hybrid_control_variate = parse_bool(value, context);
    } else if (key == "fit_lambda") {
        fit_lambda = parse_bool(value, context);
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(parse_long(value, context));
    } else if (key == "workers") {
        workers = static_cast<int>(parse_long(value, context));
    } else if (key == "csv") {
        csv_path = value;
    } else {
        throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        const std::string context = path + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw ConfigError(context + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key.empty() || value.empty()) throw ConfigError(context + ": expected key=value");
        cfg.assign(key, value, context);
    }
    return cfg;
}

} // namespace retromc
