#ifndef RETROMC_RUNNER_HPP
#define RETROMC_RUNNER_HPP

#include <functional>
#include <optional>

#include "retromc/experiment.hpp"
#include "retromc/params.hpp"
#include "retromc/rng.hpp"
#include "retromc/stats.hpp"

namespace retromc {

using SampleKernel = std::function<EstimatorSample(RngStream&)>;

// Merged per-worker accumulation. Workers own disjoint contiguous sample
// blocks and disjoint substreams (seed, worker_id, local_index); partials are
// merged in worker order, so a fixed (seed, workers) pair is reproducible.
struct RunAccumulation {
    PairedStats weight_and_control;
    RunningStats weight;
    long total_retries = 0;
    long accepted = 0;
    long samples = 0;
    bool any_rejection_based = false;
    double wall_seconds = 0.0;
};

RunAccumulation run_samples(const SampleKernel& kernel, long n, std::uint64_t seed, int workers);

// Full dispatch: build the model for the configured method, run the worker
// pool, and assemble the RunResult (control-variate adjusted where the method
// provides one).
RunResult run_experiment(const ExperimentConfig& config);

} // namespace retromc

#endif
