#include "retromc/runner.hpp"

#include <chrono>
#include <exception>
#include <thread>
#include <vector>

#include "retromc/asian_positive.hpp"
#include "retromc/asian_zero.hpp"
#include "retromc/baseline.hpp"

namespace retromc {

RunAccumulation run_samples(const SampleKernel& kernel, long n, std::uint64_t seed, int workers) {
    if (n < 2) throw ConfigError("run_samples: need n >= 2");
    int w = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
    if (static_cast<long>(w) > n) w = static_cast<int>(n);

    const auto start = std::chrono::steady_clock::now();

    std::vector<RunAccumulation> partials(static_cast<std::size_t>(w));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));

    const long base = n / w;
    const long extra = n % w;
    for (int wi = 0; wi < w; ++wi) {
        const long count = base + (wi < extra ? 1 : 0);
        pool.emplace_back([&, wi, count]() {
            auto& acc = partials[static_cast<std::size_t>(wi)];
            try {
                for (long i = 0; i < count; ++i) {
                    RngStream rng(seed, static_cast<std::uint64_t>(wi),
                                  static_cast<std::uint64_t>(i));
                    const EstimatorSample s = kernel(rng);
                    acc.weight.add(s.weight);
                    acc.weight_and_control.add(s.weight, s.control_variate);
                    acc.total_retries += s.retries;
                    if (s.accepted) ++acc.accepted;
                    else acc.any_rejection_based = true;
                    if (s.retries > 0) acc.any_rejection_based = true;
                    ++acc.samples;
                }
            } catch (...) {
                errors[static_cast<std::size_t>(wi)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    RunAccumulation merged;
    for (const auto& p : partials) {
        merged.weight.merge(p.weight);
        merged.weight_and_control.merge(p.weight_and_control);
        merged.total_retries += p.total_retries;
        merged.accepted += p.accepted;
        merged.samples += p.samples;
        merged.any_rejection_based = merged.any_rejection_based || p.any_rejection_based;
    }
    merged.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return merged;
}

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const UnderlyingPayoff payoff = config.make_payoff();
    const ModelParams& p = config.params;

    SampleKernel kernel;
    std::optional<double> control_expectation;
    bool control_fit_lambda = false;

    switch (config.method) {
        case Method::TrapKV: {
            const GridSpec grid{config.grid_steps};
            control_expectation = trap_kv_expectation(p, grid);
            control_fit_lambda = config.fit_lambda;
            kernel = [p, payoff, grid](RngStream& rng) {
                const TrapDraw d = trap_draw(p, payoff, grid, rng);
                EstimatorSample s;
                s.weight = d.payoff_value;
                s.control_variate = d.control_value;
                s.has_control_variate = true;
                return s;
            };
            break;
        }
        case Method::Exact: {
            auto model = std::make_shared<PositiveAlphaModel>(p);
            kernel = [model, payoff](RngStream& rng) {
                return exact_price_sample(*model, payoff, rng);
            };
            break;
        }
        case Method::UEBound: {
            auto model = std::make_shared<PositiveAlphaModel>(p);
            kernel = [model, payoff](RngStream& rng) {
                return ue_bound_price_sample(*model, payoff, rng);
            };
            break;
        }
        case Method::UEFree: {
            auto model = std::make_shared<PositiveAlphaModel>(p);
            const double cp = config.ue_cp > 0.0 ? config.ue_cp : 1.0 / p.maturity;
            const double c = config.ue_c != 0.0 ? config.ue_c : 1.0 / p.maturity;
            kernel = [model, payoff, cp, c](RngStream& rng) {
                return ue_free_price_sample(*model, payoff, cp, c, rng);
            };
            break;
        }
        case Method::Hybrid: {
            auto model = std::make_shared<ZeroAlphaModel>(p);
            const HybridConfig hc = config.hybrid;
            if (config.hybrid_control_variate) {
                control_expectation = kv_control_variate_price(p, p.strike);
                control_fit_lambda = true;
            }
            kernel = [model, hc, payoff](RngStream& rng) {
                return hybrid_price_sample(*model, hc, payoff, rng);
            };
            break;
        }
    }

    const RunAccumulation acc = run_samples(kernel, config.samples, config.seed, config.workers);

    RunResult result = control_expectation
                           ? summarize_with_control(acc.weight_and_control, *control_expectation,
                                                    control_fit_lambda)
                           : summarize(acc.weight);
    result.wall_seconds = acc.wall_seconds;
    if (acc.any_rejection_based) {
        const double attempts = static_cast<double>(acc.samples + acc.total_retries);
        if (config.method == Method::Hybrid) {
            result.acceptance_rate =
                static_cast<double>(acc.accepted) / static_cast<double>(acc.samples);
        } else if (attempts > 0) {
            result.acceptance_rate = static_cast<double>(acc.samples) / attempts;
        }
    }
    return result;
}

} // namespace retromc
