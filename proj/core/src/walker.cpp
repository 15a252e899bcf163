#include "jitcluster/walker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jitcluster/analytic.hpp"
#include "jitcluster/parallel.hpp"
#include "jitcluster/random.hpp"

namespace jitcluster {

namespace {

double step_minicluster(double p, const EntanglingProcedure& proc, bool integer_mode) {
    const double m = minicluster_size(p, proc);
    return integer_mode ? std::ceil(m - 1e-9) : m;
}

struct TrialResult {
    std::uint64_t successes = 0;
    double min_buffer = 0;
    bool underflow = false;
};

}  // namespace

StepMoments exact_step_moments(double p, const EntanglingProcedure& proc, bool integer_mode) {
    const double m = step_minicluster(p, proc, integer_mode);
    const double up = m - proc.c1 - 1.0;
    const double down = -(proc.c2 + 1.0);
    StepMoments out;
    out.mean = p * up + (1.0 - p) * down;
    out.variance = p * (up - out.mean) * (up - out.mean) + (1.0 - p) * (down - out.mean) * (down - out.mean);
    return out;
}

void WalkConfig::validate() const {
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in (0, 1]");
    }
    jitcluster::validate(proc);
    if (horizon < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (!(beta_multiplier >= 0.0)) {
        throw std::invalid_argument("beta_multiplier must be >= 0");
    }
    if (start_buffer && !(*start_buffer >= 0.0)) {
        throw std::invalid_argument("start_buffer must be >= 0");
    }
}

double WalkConfig::initial_buffer() const {
    const double base = start_buffer ? *start_buffer : buffer_factor(alpha) * buffer_fluctuation(p, proc);
    return beta_multiplier * base;
}

WalkStats simulate_buffer(const WalkConfig& config) {
    config.validate();

    const double m = step_minicluster(config.p, config.proc, config.integer_mode);
    const double gain = m - config.proc.c1;
    const double loss = config.proc.c2;
    const double start = config.initial_buffer();

    std::vector<TrialResult> slots(config.trials);
    parallel_for(config.trials, config.workers, [&](std::size_t trial) {
        Rng rng(derive_seed(config.seed, "walk", trial));
        TrialResult result;
        double buffer = start;
        result.min_buffer = buffer;
        result.underflow = buffer < 1.0;
        for (std::uint64_t step = 0; step < config.horizon; ++step) {
            if (rng.bernoulli(config.p)) {
                buffer += gain;
                ++result.successes;
            } else {
                buffer -= loss;
            }
            buffer -= 1.0;
            result.min_buffer = std::min(result.min_buffer, buffer);
            if (buffer < 1.0) {
                result.underflow = true;
            }
        }
        slots[trial] = result;
    });

    WalkStats stats;
    stats.trials = config.trials;
    stats.horizon = config.horizon;
    stats.start_buffer = start;
    stats.min_buffer = start;

    std::uint64_t successes = 0;
    for (const auto& slot : slots) {
        successes += slot.successes;
        stats.min_buffer = std::min(stats.min_buffer, slot.min_buffer);
        stats.underflow_trials += slot.underflow ? 1 : 0;
    }

    // Every increment takes one of two values, so the success count fixes
    // both moments exactly.
    const double up = gain - 1.0;
    const double down = -(loss + 1.0);
    const double n = static_cast<double>(config.trials) * static_cast<double>(config.horizon);
    const double k = static_cast<double>(successes);
    stats.empirical_step_mean = (k * up + (n - k) * down) / n;
    const double du = up - stats.empirical_step_mean;
    const double dd = down - stats.empirical_step_mean;
    stats.empirical_step_variance = n > 1 ? (k * du * du + (n - k) * dd * dd) / (n - 1) : 0.0;
    return stats;
}

std::vector<UnderflowRow> underflow_stats(const WalkConfig& config, std::span<const double> beta_grid) {
    if (beta_grid.empty()) {
        throw std::invalid_argument("beta grid must be nonempty");
    }
    if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) {
        throw std::invalid_argument("beta grid must be nondecreasing");
    }

    std::vector<UnderflowRow> rows;
    rows.reserve(beta_grid.size());
    for (const double b : beta_grid) {
        WalkConfig run = config;
        run.start_buffer.reset();
        run.beta_multiplier = b;
        const WalkStats stats = simulate_buffer(run);
        rows.push_back({b, static_cast<double>(stats.underflow_trials) / static_cast<double>(stats.trials),
                        stats.underflow_trials, stats.trials});
    }
    return rows;
}

std::uint64_t calibration_horizon(double p, double alpha) {
    if (!(p > 0.0 && p <= 1.0) || !(alpha >= 1.0)) {
        throw std::invalid_argument("calibration horizon needs 0 < p <= 1 and alpha >= 1");
    }
    return static_cast<std::uint64_t>(std::ceil(std::ceil(1.0 / p - 1e-12) * alpha - 1e-9));
}

}  // namespace jitcluster
