#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jitcluster/gates.hpp"
#include "jitcluster/random.hpp"

namespace jitcluster {

using ChainLength = std::uint32_t;

/// Multiset of linear-chain lengths; a length-1 chain is a bare qubit.
class ClusterPool {
public:
    ClusterPool() = default;
    /// Throws std::invalid_argument if any length is zero.
    explicit ClusterPool(std::vector<ChainLength> chains);

    static ClusterPool bare(std::uint64_t qubits);

    std::span<const ChainLength> chains() const { return chains_; }
    std::size_t size() const { return chains_.size(); }
    std::uint64_t total_qubits() const;
    std::size_t count_at_least(ChainLength length) const;
    /// Lengths in ascending order; the canonical multiset view.
    std::vector<ChainLength> sorted() const;

private:
    std::vector<ChainLength> chains_;
};

/// How chains are paired within one round.
///
/// Matching draws a uniform perfect matching over chains (one idles when the
/// count is odd). ChainEnds matches chain ends instead: a chain of length two
/// or more can attempt one gate at each end in the same step, a bare qubit
/// only one. Pairs that land on both ends of a single chain stay idle.
enum class PairingModel { ChainEnds, Matching };

/// Which costs apply inside the reservoir. Full charges c1 on every
/// successful join and c2 on every failure; FailureOnly charges c2 only.
enum class JoinCost { FailureOnly, Full };

struct ReservoirModel {
    PairingModel pairing = PairingModel::ChainEnds;
    JoinCost join_cost = JoinCost::FailureOnly;
};

/// One entangling attempt between chains of length a and b.
///
/// Success yields one chain of length max(a + b - c1, 2) (a + b under
/// FailureOnly). Failure removes c2 qubits, floor(c2/2) from each chain and
/// the odd one from a uniformly chosen side; chains shorter than one qubit
/// are dropped.
std::vector<ChainLength> attempt_join(ChainLength a,
                                      ChainLength b,
                                      bool success,
                                      const EntanglingProcedure& proc,
                                      Rng& rng,
                                      JoinCost cost = JoinCost::Full);

/// One time step of the RANDOM strategy: every paired attempt succeeds
/// independently with probability p.
ClusterPool run_round(const ClusterPool& pool,
                      double p,
                      const EntanglingProcedure& proc,
                      Rng& rng,
                      const ReservoirModel& model = {});

/// Integer chain length that counts as a finished mini-cluster: ceil(m).
ChainLength minicluster_target(double p, const EntanglingProcedure& proc);

struct YieldEstimate {
    double mean = 0;
    double std_error = 0;
    double lower95 = 0;  // mean - 1.96 std_error
    std::uint64_t trials = 0;
};

/// Mean number of chains reaching minicluster_target after tau rounds,
/// starting from q bare qubits. Trial i uses derive_seed(seed, "reservoir", i).
YieldEstimate simulate_yield(std::uint64_t q,
                             double p,
                             const EntanglingProcedure& proc,
                             unsigned tau,
                             std::uint64_t trials,
                             std::uint64_t seed,
                             const ReservoirModel& model = {},
                             unsigned workers = 1);

struct ReservoirSearchOptions {
    std::uint64_t cap = 1'000'000;
    ReservoirModel model;
    unsigned workers = 1;
};

struct ReservoirRequirement {
    std::uint64_t q = 0;
    YieldEstimate estimate;  // at q
};

/// Smallest q whose estimated yield reaches one mini-cluster, found by
/// doubling and then bisection. Every probe reuses `seed`, so neighbouring
/// probes share random streams. Throws CapacityError past options.cap.
ReservoirRequirement required_reservoir(double p,
                                        const EntanglingProcedure& proc,
                                        unsigned tau,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        const ReservoirSearchOptions& options = {});

struct FitPoint {
    double tau = 0;
    double q = 0;
};

struct GammaFit {
    double gamma = 0;  // slope of ln q against tau
    double intercept = 0;
    double r_squared = 0;
    std::vector<FitPoint> points;
};

/// Ordinary least squares of ln q on tau with a free intercept.
GammaFit fit_gamma(std::span<const FitPoint> points);

struct ScalingRow {
    unsigned tau = 0;
    double p = 0;  // 1 / tau
    ReservoirRequirement requirement;
};

/// required_reservoir at p = 1/tau for each tau; the tau point draws its
/// seed from derive_seed(seed, "reservoir-tau", tau).
std::vector<ScalingRow> reservoir_scaling(const EntanglingProcedure& proc,
                                          std::span<const unsigned> taus,
                                          std::uint64_t trials,
                                          std::uint64_t seed,
                                          const ReservoirSearchOptions& options = {});

}  // namespace jitcluster
