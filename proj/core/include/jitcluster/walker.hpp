#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jitcluster/gates.hpp"

namespace jitcluster {

struct StepMoments {
    double mean = 0;
    double variance = 0;
};

/// Exact moments of the per-step buffer increment: m - c1 - 1 with
/// probability p, -(c2 + 1) otherwise. integer_mode rounds m up.
StepMoments exact_step_moments(double p, const EntanglingProcedure& proc, bool integer_mode = false);

struct WalkConfig {
    double p = 0.5;
    EntanglingProcedure proc = procedures::double_heralding();
    std::uint64_t horizon = 1000;
    std::uint64_t trials = 1;
    double alpha = 10.0;                 // only used for the default start buffer
    std::optional<double> start_buffer;  // defaults to beta * DeltaN
    double beta_multiplier = 1.0;
    bool integer_mode = false;
    std::uint64_t seed = 0;
    unsigned workers = 1;

    void validate() const;
    /// beta_multiplier * start_buffer
    double initial_buffer() const;
};

struct WalkStats {
    double empirical_step_mean = 0;
    double empirical_step_variance = 0;  // unbiased, over all trials' steps
    double min_buffer = 0;
    std::uint64_t underflow_trials = 0;  // trials where the buffer dropped below 1
    std::uint64_t trials = 0;
    std::uint64_t horizon = 0;
    double start_buffer = 0;
};

/// Runs `trials` independent walks of `horizon` steps. Each step adds
/// m - c1 on success or removes c2 on failure, then removes the measured
/// qubit. Trial i draws from derive_seed(seed, "walk", i), so results do not
/// depend on the worker count.
WalkStats simulate_buffer(const WalkConfig& config);

struct UnderflowRow {
    double beta_multiplier = 0;
    double underflow_fraction = 0;
    std::uint64_t underflow_trials = 0;
    std::uint64_t trials = 0;
};

/// One simulate_buffer run per multiplier b, starting at b * beta * DeltaN.
/// Every run reuses the config seed, so fractions are exactly nonincreasing.
std::vector<UnderflowRow> underflow_stats(const WalkConfig& config, std::span<const double> beta_grid);

/// ceil(ceil(1/p) * alpha): horizon used for the beta calibration diagnostic.
std::uint64_t calibration_horizon(double p, double alpha);

}  // namespace jitcluster
