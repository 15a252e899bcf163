#include "jitcluster/analytic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "jitcluster/errors.hpp"

namespace jitcluster {

namespace {

void require_probability(double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "p must lie in (0, 1], got " << p;
        throw std::invalid_argument(msg.str());
    }
}

void require_alpha(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        std::ostringstream msg;
        msg << "alpha must be finite and >= 1, got " << alpha;
        throw std::invalid_argument(msg.str());
    }
}

void require_2d_capable(const ArchitectureParams& params, const EntanglingProcedure& proc) {
    if (params.dimension >= 2 && !proc.broker_client && !supports_2d_construction(proc)) {
        throw UnsupportedConstruction("'" + proc.name + "' has c2 = " + std::to_string(proc.c2) +
                                      " > 1 and cannot add vertical edges without breaking the chain");
    }
}

}  // namespace

TauModel TauModel::constant(double steps) {
    if (!(steps >= 0.0) || !std::isfinite(steps)) {
        throw std::invalid_argument("tau must be a finite value >= 0");
    }
    return TauModel(false, steps);
}

void ArchitectureParams::validate() const {
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in (0, 1]");
    }
    if (!(alpha > 1.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite and > 1");
    }
    if (dimension < 1 || dimension > 3) {
        throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
    if (logical_qubits < 1) {
        throw std::invalid_argument("logical_qubits must be positive");
    }
    if (!tau.is_reciprocal() && !(tau.constant_value() >= 0.0)) {
        throw std::invalid_argument("tau must be >= 0");
    }
}

const char* to_string(ThresholdVariant variant) {
    return variant == ThresholdVariant::General ? "general" : "printed";
}

double growth_rate(double p, const EntanglingProcedure& proc, double m) {
    require_probability(p);
    if (!(m >= 0.0)) {
        throw std::invalid_argument("mini-cluster size must be >= 0");
    }
    return p * (m - proc.c1) - (1.0 - p) * proc.c2 - 1.0;
}

double minicluster_size(double p, const EntanglingProcedure& proc) {
    require_probability(p);
    return (1.0 + p * proc.c1 + (1.0 - p) * proc.c2) / p;
}

double buffer_fluctuation(double p, const EntanglingProcedure& proc) {
    require_probability(p);
    const double c2 = proc.c2;
    const double radicand = (1.0 + c2) * (1.0 + c2) / p - c2 * (2.0 - c2);
    if (radicand < 0.0) {
        std::ostringstream msg;
        msg << "buffer fluctuation radicand is negative (" << radicand << ") for p = " << p << ", c2 = " << c2;
        throw std::domain_error(msg.str());
    }
    return std::sqrt(radicand);
}

double buffer_factor(double alpha) {
    require_alpha(alpha);
    return std::sqrt(2.0 * std::log(alpha));
}

double dimension_factor(const ArchitectureParams& params, const EntanglingProcedure& proc) {
    if (params.dimension < 1 || params.dimension > 3) {
        throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
    if (params.dimension == 1 || proc.broker_client) {
        return 1.0;
    }
    return 2.0 * (params.dimension - 1) / params.p;
}

double mean_buffer(const ArchitectureParams& params, const EntanglingProcedure& proc) {
    params.validate();
    return dimension_factor(params, proc) * buffer_factor(params.alpha) * buffer_fluctuation(params.p, proc);
}

ThresholdBreakdown t2_threshold(const ArchitectureParams& params,
                                const EntanglingProcedure& proc,
                                ThresholdVariant variant) {
    params.validate();
    validate(proc);
    require_2d_capable(params, proc);

    const double p = params.p;
    ThresholdBreakdown out;
    out.variant = variant;
    out.tau = params.tau.at(p);

    if (variant == ThresholdVariant::General) {
        out.mean_buffer = mean_buffer(params, proc);
        out.minicluster = minicluster_size(p, proc);
    } else {
        if (proc.c1 != 1 || proc.c2 != 1 || proc.broker_client) {
            throw std::invalid_argument("the printed specialisation exists only for c1 = c2 = 1");
        }
        const double ln_alpha = std::log(params.alpha);
        switch (params.dimension) {
            case 1:
                out.mean_buffer = std::sqrt((8.0 - 2.0 * p) * ln_alpha / p);
                break;
            case 2:
                out.mean_buffer = 4.0 * std::sqrt((4.0 - p) * ln_alpha / (p * p * p));
                break;
            default:
                throw std::invalid_argument("no printed specialisation for dimension " +
                                            std::to_string(params.dimension));
        }
        out.minicluster = 2.0 / p;
    }

    out.qubit_age = out.tau + out.mean_buffer + out.minicluster;
    out.t2 = params.alpha * out.qubit_age;
    return out;
}

double printed_2d_buffer_ratio(double p, double alpha) {
    ArchitectureParams params;
    params.p = p;
    params.alpha = alpha;
    params.dimension = 2;
    const auto& dh = procedures::double_heralding();
    return t2_threshold(params, dh, ThresholdVariant::PrintedSpecialization).mean_buffer /
           t2_threshold(params, dh, ThresholdVariant::General).mean_buffer;
}

double bitflip_not_error_stepwise(double p, double alpha) {
    require_probability(p);
    require_alpha(alpha);
    // delta = (1 - e^{-t/T2}) / 2 at t = T2 / alpha
    const double delta = -0.5 * std::expm1(-1.0 / alpha);
    return std::pow(1.0 - delta, 2.0 / p);
}

double bitflip_not_error_closed_form(double p, double alpha) {
    require_probability(p);
    require_alpha(alpha);
    return std::exp(-1.0 / (alpha * p)) * std::pow(std::cosh(0.5 / alpha), 2.0 / p);
}

double bitflip_not_error(double p, double alpha) {
    const double stepwise = bitflip_not_error_stepwise(p, alpha);
    const double closed = bitflip_not_error_closed_form(p, alpha);
    if (std::abs(stepwise - closed) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "bit-flip forms disagree at p = " << p << ", alpha = " << alpha << ": " << stepwise << " vs "
            << closed;
        throw std::logic_error(msg.str());
    }
    return stepwise;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t steps) {
    if (steps == 0) {
        throw std::invalid_argument("grid needs at least one step");
    }
    if (!(lo <= hi)) {
        throw std::invalid_argument("grid lower bound exceeds upper bound");
    }
    if (steps > 1 && !(lo < hi)) {
        throw std::invalid_argument("a grid with more than one step needs lo < hi");
    }
    std::vector<double> grid(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        grid[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    if (steps > 1) {
        grid.back() = hi;
    }
    return grid;
}

std::vector<SweepRow> sweep_curve(const ArchitectureParams& params_template,
                                  const EntanglingProcedure& proc,
                                  double p_min,
                                  double p_max,
                                  std::size_t steps,
                                  SweepQuantity quantity,
                                  ThresholdVariant variant) {
    if (!(p_min > 0.0 && p_max <= 1.0)) {
        throw std::invalid_argument("sweep range must satisfy 0 < p_min <= p_max <= 1");
    }
    validate(proc);

    std::vector<SweepRow> rows;
    for (const double p : uniform_grid(p_min, p_max, steps)) {
        SweepRow row;
        row.p = p;
        if (quantity == SweepQuantity::BitflipNotError) {
            row.value = bitflip_not_error(p, params_template.alpha);
        } else {
            ArchitectureParams params = params_template;
            params.p = p;
            try {
                row.breakdown = t2_threshold(params, proc, variant);
                row.value = row.breakdown->t2;
            } catch (const UnsupportedConstruction& e) {
                row.value = std::nan("");
                row.error = e.what();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace jitcluster
