#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "jitcluster/gates.hpp"

namespace jitcluster {

// All times are in units of the step time (one entangling attempt or one
// qubit measurement).

/// Mini-cluster production time: either 1/p or a fixed number of steps.
class TauModel {
public:
    static TauModel reciprocal() { return TauModel(true, 0.0); }
    static TauModel constant(double steps);

    bool is_reciprocal() const { return reciprocal_; }
    double constant_value() const { return value_; }
    double at(double p) const { return reciprocal_ ? 1.0 / p : value_; }

private:
    TauModel(bool reciprocal, double value) : reciprocal_(reciprocal), value_(value) {}

    bool reciprocal_;
    double value_;
};

struct ArchitectureParams {
    double p = 0.5;
    double alpha = 10.0;  // fault-tolerance factor
    TauModel tau = TauModel::reciprocal();
    int dimension = 1;
    int logical_qubits = 1;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class ThresholdVariant { General, PrintedSpecialization };

struct ThresholdBreakdown {
    double tau = 0;
    double mean_buffer = 0;
    double minicluster = 0;
    double qubit_age = 0;  // tau + mean_buffer + minicluster
    double t2 = 0;         // alpha * qubit_age
    ThresholdVariant variant = ThresholdVariant::General;
};

const char* to_string(ThresholdVariant variant);

/// Net buffer growth per step: p(m - c1) - (1 - p) c2 - 1.
double growth_rate(double p, const EntanglingProcedure& proc, double m);

/// Mini-cluster size that makes growth_rate vanish.
double minicluster_size(double p, const EntanglingProcedure& proc);

/// Buffer fluctuation sqrt((1 + c2)^2 / p - c2 (2 - c2)).
double buffer_fluctuation(double p, const EntanglingProcedure& proc);

/// Buffer factor sqrt(2 ln alpha); alpha >= 1.
double buffer_factor(double alpha);

/// Multiplier on beta * DeltaN: 1 for linear clusters and for broker-client
/// gates, 2(d - 1)/p otherwise.
double dimension_factor(const ArchitectureParams& params, const EntanglingProcedure& proc);

double mean_buffer(const ArchitectureParams& params, const EntanglingProcedure& proc);

/// Minimum T2 for sustained computation.
///
/// General evaluates alpha (tau + <N> + m) for any (c1, c2). The printed
/// specialisation evaluates the closed c1 = c2 = 1 expressions for d = 1 and
/// d = 2 term by term, and is rejected for other inputs. Throws
/// UnsupportedConstruction for d >= 2 with c2 > 1 on a non-broker gate.
ThresholdBreakdown t2_threshold(const ArchitectureParams& params,
                                const EntanglingProcedure& proc,
                                ThresholdVariant variant = ThresholdVariant::General);

/// Ratio of the printed 2D buffer term 4 sqrt((4 - p) ln alpha / p^3) to the
/// general one for c1 = c2 = 1. Equals sqrt(2) for every p and alpha.
double printed_2d_buffer_ratio(double p, double alpha);

/// (1 - delta)^(2/p) with delta = (1 - exp(-1/alpha)) / 2.
double bitflip_not_error_stepwise(double p, double alpha);
/// exp(-1/(alpha p)) cosh^(2/p)(1/(2 alpha)).
double bitflip_not_error_closed_form(double p, double alpha);
/// Probability of no teleported bit flip; cross-checks both forms to 1e-12.
double bitflip_not_error(double p, double alpha);

enum class SweepQuantity { T2, BitflipNotError };

struct SweepRow {
    double p = 0;
    double value = 0;
    std::optional<ThresholdBreakdown> breakdown;  // T2 sweeps only
    std::string error;                            // nonempty for flagged rows

    bool flagged() const { return !error.empty(); }
};

/// steps points from lo to hi inclusive; steps == 1 yields {lo}.
std::vector<double> uniform_grid(double lo, double hi, std::size_t steps);

/// Evaluates the quantity on a uniform p grid. Rows whose geometry the gate
/// cannot build are flagged rather than aborting the sweep.
std::vector<SweepRow> sweep_curve(const ArchitectureParams& params_template,
                                  const EntanglingProcedure& proc,
                                  double p_min,
                                  double p_max,
                                  std::size_t steps,
                                  SweepQuantity quantity,
                                  ThresholdVariant variant = ThresholdVariant::General);

}  // namespace jitcluster
