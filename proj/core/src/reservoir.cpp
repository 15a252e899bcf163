#include "jitcluster/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "jitcluster/analytic.hpp"
#include "jitcluster/errors.hpp"
#include "jitcluster/parallel.hpp"

namespace jitcluster {

namespace {

std::int64_t joined_length(std::int64_t total, std::int64_t joins, const EntanglingProcedure& proc, JoinCost cost) {
    if (cost == JoinCost::FailureOnly || joins == 0) {
        return total;
    }
    return std::max<std::int64_t>(total - joins * proc.c1, 2);
}

// Per-trial scratch space reused across rounds.
class RoundEngine {
public:
    RoundEngine(double p, const EntanglingProcedure& proc, const ReservoirModel& model)
        : p_(p), proc_(proc), model_(model) {}

    void run(std::vector<ChainLength>& chains, Rng& rng) {
        if (model_.pairing == PairingModel::Matching) {
            run_matching(chains, rng);
        } else {
            run_chain_ends(chains, rng);
        }
    }

private:
    void split_failure(std::int64_t& cut_a, std::int64_t& cut_b, Rng& rng) const {
        const int half = proc_.c2 / 2;
        cut_a += half;
        cut_b += half;
        if (proc_.c2 % 2 != 0) {
            (rng.below(2) == 0 ? cut_a : cut_b) += 1;
        }
    }

    void run_matching(std::vector<ChainLength>& chains, Rng& rng) {
        rng.shuffle(std::span<ChainLength>(chains));
        next_.clear();
        std::size_t i = 0;
        for (; i + 1 < chains.size(); i += 2) {
            const std::int64_t a = chains[i];
            const std::int64_t b = chains[i + 1];
            if (rng.bernoulli(p_)) {
                next_.push_back(static_cast<ChainLength>(joined_length(a + b, 1, proc_, model_.join_cost)));
            } else {
                std::int64_t cut_a = 0;
                std::int64_t cut_b = 0;
                split_failure(cut_a, cut_b, rng);
                if (a - cut_a >= 1) {
                    next_.push_back(static_cast<ChainLength>(a - cut_a));
                }
                if (b - cut_b >= 1) {
                    next_.push_back(static_cast<ChainLength>(b - cut_b));
                }
            }
        }
        if (i < chains.size()) {
            next_.push_back(chains[i]);
        }
        chains.swap(next_);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void run_chain_ends(std::vector<ChainLength>& chains, Rng& rng) {
        const std::size_t n = chains.size();
        ends_.clear();
        for (std::uint32_t i = 0; i < n; ++i) {
            ends_.push_back(i);
            if (chains[i] >= 2) {
                ends_.push_back(i);
            }
        }
        rng.shuffle(std::span<std::uint32_t>(ends_));

        cuts_.assign(n, 0);
        joins_.clear();
        for (std::size_t k = 0; k + 1 < ends_.size(); k += 2) {
            const std::uint32_t a = ends_[k];
            const std::uint32_t b = ends_[k + 1];
            if (a == b) {
                continue;
            }
            if (rng.bernoulli(p_)) {
                joins_.emplace_back(a, b);
            } else {
                split_failure(cuts_[a], cuts_[b], rng);
            }
        }

        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), 0u);
        total_.assign(n, 0);
        edges_.assign(n, 0);
        for (const auto& [a, b] : joins_) {
            if (chains[a] < cuts_[a] + 1 || chains[b] < cuts_[b] + 1) {
                continue;
            }
            const std::uint32_t ra = find(a);
            const std::uint32_t rb = find(b);
            if (ra == rb) {
                continue;  // would close a ring
            }
            parent_[ra] = rb;
            edges_[rb] += edges_[ra] + 1;
        }

        next_.clear();
        slot_.assign(n, -1);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::int64_t len = static_cast<std::int64_t>(chains[i]) - cuts_[i];
            if (len < 1) {
                continue;
            }
            const std::uint32_t root = find(i);
            total_[root] += len;
            if (slot_[root] < 0) {
                slot_[root] = static_cast<std::int64_t>(order_.size());
                order_.push_back(root);
            }
        }
        for (const std::uint32_t root : order_) {
            next_.push_back(static_cast<ChainLength>(joined_length(total_[root], edges_[root], proc_, model_.join_cost)));
        }
        order_.clear();
        chains.swap(next_);
    }

    double p_;
    const EntanglingProcedure& proc_;
    ReservoirModel model_;

    std::vector<ChainLength> next_;
    std::vector<std::uint32_t> ends_;
    std::vector<std::int64_t> cuts_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> joins_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::int64_t> total_;
    std::vector<std::int64_t> edges_;
    std::vector<std::int64_t> slot_;
    std::vector<std::uint32_t> order_;
};

void require_round_inputs(double p, const EntanglingProcedure& proc) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in (0, 1]");
    }
    validate(proc);
}

}  // namespace

ClusterPool::ClusterPool(std::vector<ChainLength> chains) : chains_(std::move(chains)) {
    if (std::any_of(chains_.begin(), chains_.end(), [](ChainLength c) { return c == 0; })) {
        throw std::invalid_argument("chain lengths must be >= 1");
    }
}

ClusterPool ClusterPool::bare(std::uint64_t qubits) {
    return ClusterPool(std::vector<ChainLength>(qubits, 1));
}

std::uint64_t ClusterPool::total_qubits() const {
    return std::accumulate(chains_.begin(), chains_.end(), std::uint64_t{0});
}

std::size_t ClusterPool::count_at_least(ChainLength length) const {
    return static_cast<std::size_t>(
        std::count_if(chains_.begin(), chains_.end(), [length](ChainLength c) { return c >= length; }));
}

std::vector<ChainLength> ClusterPool::sorted() const {
    std::vector<ChainLength> out = chains_;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ChainLength> attempt_join(ChainLength a,
                                      ChainLength b,
                                      bool success,
                                      const EntanglingProcedure& proc,
                                      Rng& rng,
                                      JoinCost cost) {
    if (a < 1 || b < 1) {
        throw std::invalid_argument("attempt_join needs chains of length >= 1");
    }
    validate(proc);
    if (success) {
        const std::int64_t total = static_cast<std::int64_t>(a) + b;
        return {static_cast<ChainLength>(joined_length(total, 1, proc, cost))};
    }
    std::int64_t cut_a = proc.c2 / 2;
    std::int64_t cut_b = proc.c2 / 2;
    if (proc.c2 % 2 != 0) {
        (rng.below(2) == 0 ? cut_a : cut_b) += 1;
    }
    std::vector<ChainLength> out;
    if (a - cut_a >= 1) {
        out.push_back(static_cast<ChainLength>(a - cut_a));
    }
    if (b - cut_b >= 1) {
        out.push_back(static_cast<ChainLength>(b - cut_b));
    }
    return out;
}

ClusterPool run_round(const ClusterPool& pool,
                      double p,
                      const EntanglingProcedure& proc,
                      Rng& rng,
                      const ReservoirModel& model) {
    require_round_inputs(p, proc);
    std::vector<ChainLength> chains(pool.chains().begin(), pool.chains().end());
    RoundEngine engine(p, proc, model);
    engine.run(chains, rng);
    return ClusterPool(std::move(chains));
}

ChainLength minicluster_target(double p, const EntanglingProcedure& proc) {
    // m is a ratio of small integers; the slack absorbs rounding in 1/p.
    return static_cast<ChainLength>(std::ceil(minicluster_size(p, proc) - 1e-9));
}

YieldEstimate simulate_yield(std::uint64_t q,
                             double p,
                             const EntanglingProcedure& proc,
                             unsigned tau,
                             std::uint64_t trials,
                             std::uint64_t seed,
                             const ReservoirModel& model,
                             unsigned workers) {
    require_round_inputs(p, proc);
    if (q < 1) {
        throw std::invalid_argument("reservoir size must be >= 1");
    }
    if (tau < 1) {
        throw std::invalid_argument("tau must be >= 1");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (q > std::numeric_limits<std::uint32_t>::max()) {
        throw CapacityError("reservoir size exceeds 2^32 - 1 qubits");
    }

    const ChainLength target = minicluster_target(p, proc);
    std::vector<std::uint32_t> counts(trials);
    parallel_for(trials, workers, [&](std::size_t trial) {
        Rng rng(derive_seed(seed, "reservoir", trial));
        RoundEngine engine(p, proc, model);
        std::vector<ChainLength> chains(q, 1);
        for (unsigned round = 0; round < tau; ++round) {
            engine.run(chains, rng);
        }
        counts[trial] = static_cast<std::uint32_t>(
            std::count_if(chains.begin(), chains.end(), [target](ChainLength c) { return c >= target; }));
    });

    double sum = 0;
    for (const auto c : counts) {
        sum += c;
    }
    const double n = static_cast<double>(trials);
    YieldEstimate est;
    est.trials = trials;
    est.mean = sum / n;
    if (trials > 1) {
        double ss = 0;
        for (const auto c : counts) {
            ss += (c - est.mean) * (c - est.mean);
        }
        est.std_error = std::sqrt(ss / (n - 1) / n);
    }
    est.lower95 = est.mean - 1.96 * est.std_error;
    return est;
}

ReservoirRequirement required_reservoir(double p,
                                        const EntanglingProcedure& proc,
                                        unsigned tau,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        const ReservoirSearchOptions& options) {
    if (options.cap < 1) {
        throw std::invalid_argument("reservoir cap must be >= 1");
    }
    auto probe = [&](std::uint64_t q) {
        return simulate_yield(q, p, proc, tau, trials, seed, options.model, options.workers);
    };

    std::uint64_t lo = 1;
    YieldEstimate at_hi = probe(lo);
    if (at_hi.mean >= 1.0) {
        return {lo, at_hi};
    }
    std::uint64_t hi = lo;
    for (;;) {
        if (hi >= options.cap) {
            std::ostringstream msg;
            msg << "no reservoir up to the cap of " << options.cap << " qubits yields a mini-cluster (p = " << p
                << ", tau = " << tau << ", " << proc.name << ")";
            throw CapacityError(msg.str());
        }
        lo = hi;
        hi = std::min(hi * 2, options.cap);
        at_hi = probe(hi);
        if (at_hi.mean >= 1.0) {
            break;
        }
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        const YieldEstimate est = probe(mid);
        if (est.mean >= 1.0) {
            hi = mid;
            at_hi = est;
        } else {
            lo = mid;
        }
    }
    return {hi, at_hi};
}

GammaFit fit_gamma(std::span<const FitPoint> points) {
    if (points.size() < 2) {
        throw std::invalid_argument("fit needs at least two points");
    }
    double mean_x = 0;
    double mean_y = 0;
    for (const auto& pt : points) {
        if (!(pt.q >= 1.0)) {
            throw std::invalid_argument("reservoir sizes in a fit must be >= 1");
        }
        mean_x += pt.tau;
        mean_y += std::log(pt.q);
    }
    const double n = static_cast<double>(points.size());
    mean_x /= n;
    mean_y /= n;

    double sxx = 0;
    double sxy = 0;
    double syy = 0;
    for (const auto& pt : points) {
        const double dx = pt.tau - mean_x;
        const double dy = std::log(pt.q) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit is degenerate: all tau values are equal");
    }

    GammaFit fit;
    fit.gamma = sxy / sxx;
    fit.intercept = mean_y - fit.gamma * mean_x;
    double ss_res = 0;
    for (const auto& pt : points) {
        const double r = std::log(pt.q) - (fit.intercept + fit.gamma * pt.tau);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.points.assign(points.begin(), points.end());
    return fit;
}

std::vector<ScalingRow> reservoir_scaling(const EntanglingProcedure& proc,
                                          std::span<const unsigned> taus,
                                          std::uint64_t trials,
                                          std::uint64_t seed,
                                          const ReservoirSearchOptions& options) {
    std::vector<ScalingRow> rows;
    rows.reserve(taus.size());
    for (const unsigned tau : taus) {
        if (tau < 1) {
            throw std::invalid_argument("tau values must be >= 1");
        }
        ScalingRow row;
        row.tau = tau;
        row.p = 1.0 / tau;
        row.requirement = required_reservoir(row.p, proc, tau, trials, derive_seed(seed, "reservoir-tau", tau), options);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace jitcluster
