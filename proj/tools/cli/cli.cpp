#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jitcluster/analytic.hpp"
#include "jitcluster/errors.hpp"
#include "jitcluster/gates.hpp"
#include "jitcluster/graphstate.hpp"
#include "jitcluster/random.hpp"
#include "jitcluster/reservoir.hpp"
#include "jitcluster/walker.hpp"

namespace jitcluster::cli {

namespace {

using Json = nlohmann::ordered_json;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    std::string config;
    unsigned workers = 1;
};

struct Artifact {
    std::string text;
    std::string summary;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void add_common(CLI::App* sub, Common& common) {
    sub->add_option("--seed", common.seed, "Master seed");
    sub->add_option("--out", common.out, "Output file (default: stdout)");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json", "dot"}));
    sub->add_option("--config", common.config, "Config file with key = value lines");
    sub->add_option("--workers", common.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
}

std::string resolve_format(const Common& common, const std::string& fallback, std::initializer_list<const char*> allowed) {
    const std::string format = common.format.empty() ? fallback : common.format;
    for (const char* a : allowed) {
        if (format == a) {
            return format;
        }
    }
    throw ConfigError("format: '" + format + "' is not available for this command");
}

// Config entries become --key=value arguments unless the key already
// appears on the command line, so flags always win.
std::vector<std::string> inject_config(const std::vector<std::string>& args, const CLI::App& app) {
    const CLI::App* sub = nullptr;
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (sub == nullptr) {
            sub = app.get_subcommand_no_throw(args[i]);
        }
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (!config_path || sub == nullptr) {
        return args;
    }

    std::ifstream in(*config_path);
    if (!in) {
        throw ConfigError("config: cannot read '" + *config_path + "'");
    }
    std::vector<std::string> merged = args;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        for (char& c : key) {
            if (c == '_') {
                c = '-';
            }
        }
        if (key.empty() || key == "config") {
            throw ConfigError("config line " + std::to_string(line_no) + ": invalid key '" + key + "'");
        }
        if (sub->get_option_no_throw("--" + key) == nullptr) {
            throw ConfigError("config: unknown key '" + key + "'");
        }
        const std::string flag = "--" + key;
        bool on_command_line = false;
        for (const auto& a : args) {
            on_command_line = on_command_line || a == flag || a.rfind(flag + "=", 0) == 0;
        }
        if (!on_command_line) {
            merged.push_back(flag + "=" + value);
        }
    }
    return merged;
}

struct ProcedureChoice {
    std::string name = "dh";
    std::optional<int> c1;
    std::optional<int> c2;
    bool broker_client = false;
};

void add_procedure(CLI::App* sub, ProcedureChoice& choice) {
    sub->add_option("--procedure", choice.name, "fusion1 | fusion2 | dh | rus | bc (case-insensitive)");
    sub->add_option("--c1", choice.c1, "Override qubits lost on success");
    sub->add_option("--c2", choice.c2, "Override qubits lost on failure");
    sub->add_flag("--broker-client", choice.broker_client, "Mark the gate as broker-client");
}

EntanglingProcedure lookup_procedure(const ProcedureChoice& choice) {
    EntanglingProcedure base;
    try {
        base = procedure_by_name(choice.name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("procedure: ") + e.what());
    }
    if (!choice.c1 && !choice.c2 && !choice.broker_client) {
        return base;
    }
    return make_procedure("custom", "Custom (" + base.name + " overrides)", choice.c1.value_or(base.c1),
                          choice.c2.value_or(base.c2), choice.broker_client || base.broker_client);
}

// threshold ------------------------------------------------------------------

struct ThresholdOptions {
    ProcedureChoice procedure;
    double alpha = 10.0;
    int dim = 1;
    std::optional<double> tau;
    double p_min = 0.05;
    double p_max = 1.0;
    std::size_t p_steps = 96;
    std::string variant = "general";
};

void add_threshold(CLI::App& app, ThresholdOptions& o, Common& common) {
    auto* sub = app.add_subcommand("threshold", "Minimum T2 over a p grid");
    add_procedure(sub, o.procedure);
    sub->add_option("--alpha", o.alpha, "Fault-tolerance factor");
    sub->add_option("--dim", o.dim, "Cluster dimension (1, 2 or 3)");
    sub->add_option("--tau", o.tau, "Fixed mini-cluster production time (default 1/p)");
    sub->add_option("--p-min", o.p_min, "Smallest p in the grid");
    sub->add_option("--p-max", o.p_max, "Largest p in the grid");
    sub->add_option("--p-steps", o.p_steps, "Grid points, inclusive of both ends");
    sub->add_option("--variant", o.variant, "general, or the printed c1 = c2 = 1 form")->check(CLI::IsMember({"general", "printed"}));
    add_common(sub, common);
}

Artifact run_threshold(const ThresholdOptions& o, const Common& common) {
    const std::string format = resolve_format(common, "csv", {"csv", "json"});
    const EntanglingProcedure proc = lookup_procedure(o.procedure);
    ArchitectureParams params;
    params.alpha = o.alpha;
    params.dimension = o.dim;
    params.p = o.p_max;
    if (o.tau) {
        params.tau = TauModel::constant(*o.tau);
    }
    const ThresholdVariant variant =
        o.variant == "printed" ? ThresholdVariant::PrintedSpecialization : ThresholdVariant::General;
    const auto rows = sweep_curve(params, proc, o.p_min, o.p_max, o.p_steps, SweepQuantity::T2, variant);

    std::size_t flagged = 0;
    Artifact a;
    if (format == "csv") {
        std::string& s = a.text;
        s = "p,t2_over_dt,tau,mean_buffer,minicluster,variant\n";
        for (const auto& row : rows) {
            const double nan = std::nan("");
            const ThresholdBreakdown b = row.breakdown.value_or(ThresholdBreakdown{nan, nan, nan, nan, nan, variant});
            s += num(row.p) + ',' + num(row.value) + ',' + num(b.tau) + ',' + num(b.mean_buffer) + ',' +
                 num(b.minicluster) + ',' + to_string(variant) + '\n';
        }
    } else {
        Json doc;
        doc["procedure"] = proc.key;
        doc["alpha"] = o.alpha;
        doc["dimension"] = o.dim;
        doc["variant"] = to_string(variant);
        Json list = Json::array();
        for (const auto& row : rows) {
            Json r;
            r["p"] = row.p;
            if (row.breakdown) {
                r["t2_over_dt"] = row.value;
                r["tau"] = row.breakdown->tau;
                r["mean_buffer"] = row.breakdown->mean_buffer;
                r["minicluster"] = row.breakdown->minicluster;
            } else {
                r["error"] = row.error;
            }
            list.push_back(std::move(r));
        }
        doc["rows"] = std::move(list);
        a.text = doc.dump(2) + "\n";
    }
    for (const auto& row : rows) {
        flagged += row.flagged() ? 1 : 0;
    }
    a.summary = std::to_string(rows.size()) + " rows, " + std::to_string(flagged) + " flagged";
    return a;
}

// bitflip --------------------------------------------------------------------

struct BitflipOptions {
    double alpha = 10.0;
    double p_min = 0.05;
    double p_max = 1.0;
    std::size_t p_steps = 96;
};

void add_bitflip(CLI::App& app, BitflipOptions& o, Common& common) {
    auto* sub = app.add_subcommand("bitflip", "Probability of no teleported bit flip over a p grid");
    sub->add_option("--alpha", o.alpha, "Fault-tolerance factor");
    sub->add_option("--p-min", o.p_min, "Smallest p in the grid");
    sub->add_option("--p-max", o.p_max, "Largest p in the grid");
    sub->add_option("--p-steps", o.p_steps, "Grid points, inclusive of both ends");
    add_common(sub, common);
}

Artifact run_bitflip(const BitflipOptions& o, const Common& common) {
    const std::string format = resolve_format(common, "csv", {"csv", "json"});
    ArchitectureParams params;
    params.alpha = o.alpha;
    params.p = o.p_max;
    const auto rows =
        sweep_curve(params, procedures::double_heralding(), o.p_min, o.p_max, o.p_steps, SweepQuantity::BitflipNotError);
    Artifact a;
    if (format == "csv") {
        a.text = "p,not_error\n";
        for (const auto& row : rows) {
            a.text += num(row.p) + ',' + num(row.value) + '\n';
        }
    } else {
        Json doc;
        doc["alpha"] = o.alpha;
        Json list = Json::array();
        for (const auto& row : rows) {
            list.push_back(Json{{"p", row.p}, {"not_error", row.value}});
        }
        doc["rows"] = std::move(list);
        a.text = doc.dump(2) + "\n";
    }
    a.summary = std::to_string(rows.size()) + " rows";
    return a;
}

// walk -----------------------------------------------------------------------

struct WalkOptions {
    ProcedureChoice procedure;
    double p = 0.5;
    std::optional<std::uint64_t> horizon;
    std::uint64_t trials = 1;
    double alpha = 10.0;
    std::optional<double> start_buffer;
    double beta_multiplier = 1.0;
    bool integer_mode = false;
    bool calibrate = false;
    std::vector<double> beta_grid;
};

void add_walk(CLI::App& app, WalkOptions& o, Common& common) {
    auto* sub = app.add_subcommand("walk", "Buffer random walk");
    add_procedure(sub, o.procedure);
    sub->add_option("--p", o.p, "Success probability");
    sub->add_option("--horizon", o.horizon, "Steps per trial (default 1000)");
    sub->add_option("--trials", o.trials, "Independent walks");
    sub->add_option("--alpha", o.alpha, "Fault-tolerance factor for the default start buffer");
    sub->add_option("--start-buffer", o.start_buffer, "Start buffer before the multiplier (default beta * DeltaN)");
    sub->add_option("--beta-multiplier", o.beta_multiplier, "Scales the start buffer");
    sub->add_flag("--integer-mode", o.integer_mode, "Round the mini-cluster size up");
    sub->add_flag("--calibrate", o.calibrate, "Use horizon ceil(1/p) * alpha unless --horizon is given");
    sub->add_option("--beta-grid", o.beta_grid, "Comma-separated multipliers for an underflow table")->delimiter(',');
    add_common(sub, common);
}

Artifact run_walk(const WalkOptions& o, const Common& common) {
    const std::string format = resolve_format(common, o.beta_grid.empty() ? "json" : "csv", {"csv", "json"});
    WalkConfig config;
    config.p = o.p;
    config.proc = lookup_procedure(o.procedure);
    config.trials = o.trials;
    config.alpha = o.alpha;
    config.start_buffer = o.start_buffer;
    config.beta_multiplier = o.beta_multiplier;
    config.integer_mode = o.integer_mode;
    config.seed = common.seed;
    config.workers = common.workers;
    if (o.horizon) {
        config.horizon = *o.horizon;
    } else if (o.calibrate) {
        config.horizon = calibration_horizon(o.p, o.alpha);
    }

    Artifact a;
    if (!o.beta_grid.empty()) {
        const auto rows = underflow_stats(config, o.beta_grid);
        if (format == "csv") {
            a.text = "beta_multiplier,underflow_fraction,underflow_trials,trials\n";
            for (const auto& row : rows) {
                a.text += num(row.beta_multiplier) + ',' + num(row.underflow_fraction) + ',' +
                          std::to_string(row.underflow_trials) + ',' + std::to_string(row.trials) + '\n';
            }
        } else {
            Json doc;
            doc["procedure"] = config.proc.key;
            doc["p"] = config.p;
            doc["horizon"] = config.horizon;
            doc["inverse_alpha"] = 1.0 / config.alpha;
            Json list = Json::array();
            for (const auto& row : rows) {
                list.push_back(Json{{"beta_multiplier", row.beta_multiplier},
                                    {"underflow_fraction", row.underflow_fraction},
                                    {"underflow_trials", row.underflow_trials},
                                    {"trials", row.trials}});
            }
            doc["rows"] = std::move(list);
            a.text = doc.dump(2) + "\n";
        }
        a.summary = std::to_string(rows.size()) + " multipliers, horizon " + std::to_string(config.horizon);
        return a;
    }

    const WalkStats stats = simulate_buffer(config);
    const StepMoments exact = exact_step_moments(config.p, config.proc, config.integer_mode);
    const double dn = buffer_fluctuation(config.p, config.proc);
    const double fraction = static_cast<double>(stats.underflow_trials) / static_cast<double>(stats.trials);
    if (format == "csv") {
        a.text =
            "empirical_step_mean,empirical_step_variance,exact_step_mean,exact_step_variance,delta_n_squared,"
            "min_buffer,underflow_trials,trials,horizon,start_buffer\n";
        a.text += num(stats.empirical_step_mean) + ',' + num(stats.empirical_step_variance) + ',' + num(exact.mean) +
                  ',' + num(exact.variance) + ',' + num(dn * dn) + ',' + num(stats.min_buffer) + ',' +
                  std::to_string(stats.underflow_trials) + ',' + std::to_string(stats.trials) + ',' +
                  std::to_string(stats.horizon) + ',' + num(stats.start_buffer) + '\n';
    } else {
        Json doc;
        doc["procedure"] = config.proc.key;
        doc["p"] = config.p;
        doc["horizon"] = stats.horizon;
        doc["trials"] = stats.trials;
        doc["seed"] = config.seed;
        doc["start_buffer"] = stats.start_buffer;
        doc["empirical_step_mean"] = stats.empirical_step_mean;
        doc["empirical_step_variance"] = stats.empirical_step_variance;
        doc["exact_step_mean"] = exact.mean;
        doc["exact_step_variance"] = exact.variance;
        doc["delta_n_squared"] = dn * dn;
        doc["min_buffer"] = stats.min_buffer;
        doc["underflow_trials"] = stats.underflow_trials;
        doc["underflow_fraction"] = fraction;
        doc["inverse_alpha"] = 1.0 / config.alpha;
        a.text = doc.dump(2) + "\n";
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "step variance %.4f (exact %.4f, DeltaN^2 %.4f), underflow %.4f", stats.empirical_step_variance,
                  exact.variance, dn * dn, fraction);
    a.summary = buf;
    return a;
}

// reservoir ------------------------------------------------------------------

struct ReservoirOptions {
    ProcedureChoice procedure;
    std::vector<unsigned> taus{2, 3, 4, 5, 6};
    std::uint64_t trials = 2000;
    std::uint64_t cap = 1'000'000;
    std::string pairing = "chain-ends";
    std::string join_cost = "failure-only";
    std::string summary_out;
};

void add_reservoir(CLI::App& app, ReservoirOptions& o, Common& common) {
    auto* sub = app.add_subcommand("reservoir", "Required reservoir size against tau = 1/p");
    add_procedure(sub, o.procedure);
    sub->add_option("--tau-list", o.taus, "Comma-separated tau values")->delimiter(',');
    sub->add_option("--trials", o.trials, "Trials per yield estimate");
    sub->add_option("--cap", o.cap, "Largest reservoir the search may try");
    sub->add_option("--pairing", o.pairing, "How chains are paired each round")->check(CLI::IsMember({"chain-ends", "matching"}));
    sub->add_option("--join-cost", o.join_cost, "Which outcomes consume qubits")->check(CLI::IsMember({"failure-only", "full"}));
    sub->add_option("--summary-out", o.summary_out, "Write the exponential fit as JSON");
    add_common(sub, common);
}

Json fit_json(const std::optional<GammaFit>& fit) {
    Json doc;
    if (fit) {
        doc["gamma"] = fit->gamma;
        doc["intercept"] = fit->intercept;
        doc["r_squared"] = fit->r_squared;
    } else {
        doc["gamma"] = nullptr;
        doc["intercept"] = nullptr;
        doc["r_squared"] = nullptr;
    }
    return doc;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    f << text;
    if (!f) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

Artifact run_reservoir(const ReservoirOptions& o, const Common& common) {
    const std::string format = resolve_format(common, "csv", {"csv", "json"});
    const EntanglingProcedure proc = lookup_procedure(o.procedure);
    if (o.taus.empty()) {
        throw ConfigError("tau-list: must not be empty");
    }
    ReservoirSearchOptions options;
    options.cap = o.cap;
    options.workers = common.workers;
    options.model.pairing = o.pairing == "matching" ? PairingModel::Matching : PairingModel::ChainEnds;
    options.model.join_cost = o.join_cost == "full" ? JoinCost::Full : JoinCost::FailureOnly;

    const auto rows = reservoir_scaling(proc, o.taus, o.trials, common.seed, options);
    std::vector<FitPoint> points;
    for (const auto& row : rows) {
        points.push_back({static_cast<double>(row.tau), static_cast<double>(row.requirement.q)});
    }
    std::optional<GammaFit> fit;
    try {
        fit = fit_gamma(points);
    } catch (const std::invalid_argument&) {
        // fewer than two distinct tau values: nothing to fit
    }

    Artifact a;
    if (format == "csv") {
        a.text = "tau,p,q_required,yield_estimate\n";
        for (const auto& row : rows) {
            a.text += std::to_string(row.tau) + ',' + num(row.p) + ',' + std::to_string(row.requirement.q) + ',' +
                      num(row.requirement.estimate.mean) + '\n';
        }
    } else {
        Json doc = fit_json(fit);
        doc["procedure"] = proc.key;
        doc["pairing"] = o.pairing;
        doc["join_cost"] = o.join_cost;
        doc["trials"] = o.trials;
        doc["seed"] = common.seed;
        Json list = Json::array();
        for (const auto& row : rows) {
            list.push_back(Json{{"tau", row.tau},
                                {"p", row.p},
                                {"q_required", row.requirement.q},
                                {"yield_estimate", row.requirement.estimate.mean},
                                {"std_error", row.requirement.estimate.std_error},
                                {"lower95", row.requirement.estimate.lower95}});
        }
        doc["rows"] = std::move(list);
        a.text = doc.dump(2) + "\n";
    }
    if (!o.summary_out.empty()) {
        write_file(o.summary_out, fit_json(fit).dump(2) + "\n");
    }
    if (fit) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu tau points, gamma %.4f, r^2 %.4f", rows.size(), fit->gamma, fit->r_squared);
        a.summary = buf;
    } else {
        a.summary = std::to_string(rows.size()) + " tau point(s), no fit";
    }
    return a;
}

// graph ----------------------------------------------------------------------

struct GraphOptions {
    std::string action;
    std::size_t length = 5;
    std::optional<VertexId> pos;
    std::size_t pos_a = 3;
    std::size_t pos_b = 3;
    std::string outcome = "success";
    ProcedureChoice procedure;
    std::string cleanup = "y";
    std::size_t chains = 3;
    double p = 1.0;
    std::uint64_t max_attempts = 100;
    std::size_t orbit_limit = std::size_t{1} << 19;
};

void add_graph(CLI::App& app, GraphOptions& o, Common& common) {
    auto* sub = app.add_subcommand("graph", "Graph-state constructions");
    sub->add_option("action", o.action, "demo-x | vertical | honeycomb | lc-check")
        ->required()
        ->check(CLI::IsMember({"demo-x", "vertical", "honeycomb", "lc-check"}));
    sub->add_option("--length", o.length, "Chain length");
    sub->add_option("--pos", o.pos, "Measured vertex id on the path 1..length");
    sub->add_option("--pos-a", o.pos_a, "1-based site on chain A (vertical)");
    sub->add_option("--pos-b", o.pos_b, "1-based site on chain B (vertical)");
    sub->add_option("--outcome", o.outcome, "Gate outcome (vertical)")->check(CLI::IsMember({"success", "failure"}));
    add_procedure(sub, o.procedure);
    sub->add_option("--cleanup", o.cleanup, "Basis for removing the entangled cherries")
        ->check(CLI::IsMember({"y", "z", "Y", "Z"}));
    sub->add_option("--chains", o.chains, "Number of chains (honeycomb)");
    sub->add_option("--p", o.p, "Gate success probability (honeycomb)");
    sub->add_option("--max-attempts", o.max_attempts, "Attempts per vertical edge (honeycomb)");
    sub->add_option("--orbit-limit", o.orbit_limit, "Largest LC orbit explored (lc-check)");
    add_common(sub, common);
}

std::string render_graph(const GraphState& g, const std::string& format) {
    return format == "dot" ? to_dot(g) : to_json(g);
}

Artifact run_graph(const GraphOptions& o, const Common& common) {
    Artifact a;
    if (o.action == "demo-x") {
        const std::string format = resolve_format(common, "dot", {"dot", "json"});
        const VertexId v = o.pos.value_or(3);
        const GraphState g = measure(GraphState::path(1, o.length, 0), v, PauliBasis::X);
        a.text = render_graph(g, format);
        a.summary = "X on vertex " + std::to_string(v) + " of a " + std::to_string(o.length) + "-path, " +
                    std::to_string(g.edge_count()) + " edges";
        return a;
    }
    if (o.action == "vertical") {
        const std::string format = resolve_format(common, "dot", {"dot", "json"});
        std::vector<VertexId> chain_a;
        std::vector<VertexId> chain_b;
        GraphState g;
        const GraphState pa = GraphState::path(1, o.length, 0);
        const GraphState pb = GraphState::path(static_cast<VertexId>(o.length + 1), o.length, 1);
        for (const GraphState* part : {&pa, &pb}) {
            for (const VertexId v : part->vertices()) {
                g.add_vertex(v, part->label(v));
                (part == &pa ? chain_a : chain_b).push_back(v);
            }
            for (const auto& [u, v] : part->edges()) {
                g.add_edge(u, v);
            }
        }
        if (o.pos_a < 1 || o.pos_b < 1) {
            throw ConfigError("pos-a/pos-b: positions are 1-based");
        }
        const auto result = vertical_edge_procedure(
            g, chain_a, o.pos_a - 1, chain_b, o.pos_b - 1,
            o.outcome == "success" ? GateOutcome::Success : GateOutcome::Failure, lookup_procedure(o.procedure),
            (o.cleanup == "z" || o.cleanup == "Z") ? PauliBasis::Z : PauliBasis::Y);
        a.text = render_graph(result.graph, format);
        a.summary = o.outcome + ": residual chains " + std::to_string(result.chain_a.size()) + " and " +
                    std::to_string(result.chain_b.size()) +
                    (result.vertical_edge ? ", one vertical edge" : ", no vertical edge");
        return a;
    }
    if (o.action == "honeycomb") {
        const std::string format = resolve_format(common, "dot", {"dot", "json"});
        Rng rng(derive_seed(common.seed, "honeycomb", 0));
        const auto result = build_honeycomb(o.chains, o.length, o.p, lookup_procedure(o.procedure), o.max_attempts, rng,
                                            (o.cleanup == "z" || o.cleanup == "Z") ? PauliBasis::Z : PauliBasis::Y);
        a.text = render_graph(result.graph, format);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu vertical edges in %llu attempts, coverage %.3f%s", result.vertical_edges.size(),
                      static_cast<unsigned long long>(result.attempts), result.coverage,
                      result.complete ? "" : ", INCOMPLETE (attempt budget exhausted)");
        a.summary = buf;
        return a;
    }

    // lc-check: X-measuring an interior vertex of a path should give a
    // shorter path with one pendant vertex, up to local complementation.
    resolve_format(common, "json", {"json"});
    if (o.length < 4) {
        throw ConfigError("length: lc-check needs a path of at least 4 vertices");
    }
    if (o.length > kMaxLcVertices) {
        throw CapacityError("length " + std::to_string(o.length) + " exceeds the LC search limit of " +
                            std::to_string(kMaxLcVertices) + " vertices");
    }
    std::vector<VertexId> positions;
    if (o.pos) {
        if (*o.pos < 2 || *o.pos + 1 > o.length) {
            throw ConfigError("pos: must be an interior vertex id");
        }
        positions.push_back(*o.pos);
    } else {
        for (VertexId v = 2; v < o.length; ++v) {
            positions.push_back(v);
        }
    }
    Json doc;
    doc["length"] = o.length;
    Json checks = Json::array();
    bool all = true;
    for (const VertexId v : positions) {
        const GraphState measured = measure(GraphState::path(1, o.length), v, PauliBasis::X);
        GraphState target = GraphState::path(1, o.length - 2);
        const auto pendant = static_cast<VertexId>(o.length - 1);
        target.add_vertex(pendant);
        target.add_edge(pendant, v - 1);
        const bool equivalent = lc_equivalent(measured, target, o.orbit_limit);
        all = all && equivalent;
        checks.push_back(Json{{"position", v}, {"equivalent", equivalent}});
    }
    doc["checks"] = std::move(checks);
    doc["all_equivalent"] = all;
    a.text = doc.dump(2) + "\n";
    a.summary = std::to_string(positions.size()) + " position(s), " + (all ? "all LC-equivalent" : "NOT all LC-equivalent");
    return a;
}

}  // namespace

Terminal detect_terminal() {
    Terminal t;
    t.color = ::isatty(STDERR_FILENO) != 0 && std::getenv("NO_COLOR") == nullptr;
    return t;
}

int parse_and_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal terminal) {
    CLI::App app{"Just-in-time cluster state growth: thresholds, walks, reservoirs and graph constructions", "jitcluster"};
    app.require_subcommand(1);

    Common common;
    ThresholdOptions threshold;
    BitflipOptions bitflip;
    WalkOptions walk;
    ReservoirOptions reservoir;
    GraphOptions graph;
    add_threshold(app, threshold, common);
    add_bitflip(app, bitflip, common);
    add_walk(app, walk, common);
    add_reservoir(app, reservoir, common);
    add_graph(app, graph, common);

    const auto prefix = [&](const std::string& name) {
        return terminal.color ? "\033[1;32mjitcluster " + name + "\033[0m: " : "jitcluster " + name + ": ";
    };
    const auto fail_prefix = [&]() { return terminal.color ? std::string("\033[1;31merror\033[0m: ") : std::string("error: "); };

    try {
        std::vector<std::string> argv = inject_config(args, app);
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);

        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        Artifact artifact;
        if (name == "threshold") {
            artifact = run_threshold(threshold, common);
        } else if (name == "bitflip") {
            artifact = run_bitflip(bitflip, common);
        } else if (name == "walk") {
            artifact = run_walk(walk, common);
        } else if (name == "reservoir") {
            artifact = run_reservoir(reservoir, common);
        } else {
            artifact = run_graph(graph, common);
        }

        if (common.out.empty()) {
            out << artifact.text;
            out.flush();
        } else {
            write_file(common.out, artifact.text);
        }
        err << prefix(name) << artifact.summary << " -> " << (common.out.empty() ? "stdout" : common.out) << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << fail_prefix() << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const CapacityError& e) {
        err << fail_prefix() << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::invalid_argument& e) {
        err << fail_prefix() << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::domain_error& e) {
        err << fail_prefix() << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        err << fail_prefix() << e.what() << '\n';
        return 1;
    }
}

}  // namespace jitcluster::cli
