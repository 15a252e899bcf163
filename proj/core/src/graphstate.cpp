#include "jitcluster/graphstate.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include <json.hpp>

#include "jitcluster/errors.hpp"

namespace jitcluster {

const char* to_string(VertexRole role) {
    switch (role) {
        case VertexRole::Chain:
            return "chain";
        case VertexRole::Cherry:
            return "cherry";
        case VertexRole::Intermediate:
            return "intermediate";
    }
    return "chain";
}

const char* to_string(PauliBasis basis) {
    switch (basis) {
        case PauliBasis::X:
            return "X";
        case PauliBasis::Y:
            return "Y";
        case PauliBasis::Z:
            return "Z";
    }
    return "Z";
}

namespace {

std::string vertex_name(VertexId v) { return std::to_string(v); }

Edge ordered(VertexId u, VertexId v) { return u < v ? Edge{u, v} : Edge{v, u}; }

}  // namespace

GraphState GraphState::path(std::span<const VertexId> ids, std::optional<int> chain) {
    GraphState g;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        VertexLabel label;
        label.chain = chain;
        label.position = static_cast<int>(i);
        g.add_vertex(ids[i], label);
        if (i > 0) {
            g.add_edge(ids[i - 1], ids[i]);
        }
    }
    return g;
}

GraphState GraphState::path(VertexId first, std::size_t length, std::optional<int> chain) {
    std::vector<VertexId> ids(length);
    for (std::size_t i = 0; i < length; ++i) {
        ids[i] = first + static_cast<VertexId>(i);
    }
    return path(ids, chain);
}

GraphState::Node& GraphState::node(VertexId v) {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) {
        throw std::invalid_argument("unknown vertex " + vertex_name(v));
    }
    return it->second;
}

const GraphState::Node& GraphState::node(VertexId v) const {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) {
        throw std::invalid_argument("unknown vertex " + vertex_name(v));
    }
    return it->second;
}

void GraphState::add_vertex(VertexId v, VertexLabel label) {
    if (!nodes_.emplace(v, Node{std::move(label), {}}).second) {
        throw std::invalid_argument("vertex " + vertex_name(v) + " already present");
    }
}

void GraphState::add_edge(VertexId u, VertexId v) {
    if (u == v) {
        throw std::invalid_argument("self-loop on vertex " + vertex_name(u));
    }
    Node& a = node(u);
    Node& b = node(v);
    if (a.adjacent.count(v) != 0) {
        throw std::invalid_argument("edge " + vertex_name(u) + "-" + vertex_name(v) + " already present");
    }
    a.adjacent.insert(v);
    b.adjacent.insert(u);
}

void GraphState::remove_edge(VertexId u, VertexId v) {
    Node& a = node(u);
    Node& b = node(v);
    if (a.adjacent.erase(v) == 0) {
        throw std::invalid_argument("edge " + vertex_name(u) + "-" + vertex_name(v) + " not present");
    }
    b.adjacent.erase(u);
}

void GraphState::toggle_edge(VertexId u, VertexId v) {
    if (has_edge(u, v)) {
        remove_edge(u, v);
    } else {
        add_edge(u, v);
    }
}

void GraphState::remove_vertex(VertexId v) {
    const Node& n = node(v);
    for (const VertexId w : n.adjacent) {
        nodes_.at(w).adjacent.erase(v);
    }
    nodes_.erase(v);
}

bool GraphState::has_edge(VertexId u, VertexId v) const { return node(u).adjacent.count(v) != 0 && contains(v); }

const std::set<VertexId>& GraphState::neighbors(VertexId v) const { return node(v).adjacent; }

std::size_t GraphState::edge_count() const {
    std::size_t twice = 0;
    for (const auto& [id, n] : nodes_) {
        twice += n.adjacent.size();
    }
    return twice / 2;
}

std::vector<VertexId> GraphState::vertices() const {
    std::vector<VertexId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) {
        out.push_back(id);
    }
    return out;
}

std::vector<Edge> GraphState::edges() const {
    std::vector<Edge> out;
    for (const auto& [id, n] : nodes_) {
        for (auto it = n.adjacent.upper_bound(id); it != n.adjacent.end(); ++it) {
            out.emplace_back(id, *it);
        }
    }
    return out;
}

const VertexLabel& GraphState::label(VertexId v) const { return node(v).label; }

void GraphState::set_label(VertexId v, VertexLabel label) { node(v).label = std::move(label); }

void GraphState::local_complement_in_place(VertexId v) {
    const std::vector<VertexId> nbrs(node(v).adjacent.begin(), node(v).adjacent.end());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
            toggle_edge(nbrs[i], nbrs[j]);
        }
    }
}

bool GraphState::same_edges(const GraphState& other) const {
    if (nodes_.size() != other.nodes_.size()) {
        return false;
    }
    auto it = other.nodes_.begin();
    for (const auto& [id, n] : nodes_) {
        if (it->first != id || it->second.adjacent != n.adjacent) {
            return false;
        }
        ++it;
    }
    return true;
}

GraphState local_complement(GraphState g, VertexId v) {
    g.local_complement_in_place(v);
    return g;
}

std::optional<VertexId> x_measurement_pivot(const GraphState& g, VertexId v) {
    const auto& nbrs = g.neighbors(v);
    if (nbrs.empty()) {
        return std::nullopt;
    }
    return *nbrs.begin();
}

GraphState measure(GraphState g, VertexId v, PauliBasis basis) {
    switch (basis) {
        case PauliBasis::Z:
            g.remove_vertex(v);
            break;
        case PauliBasis::Y:
            g.local_complement_in_place(v);
            g.remove_vertex(v);
            break;
        case PauliBasis::X: {
            const auto b0 = x_measurement_pivot(g, v);
            if (!b0) {
                g.remove_vertex(v);
                break;
            }
            g.local_complement_in_place(*b0);
            g.local_complement_in_place(v);
            g.remove_vertex(v);
            g.local_complement_in_place(*b0);
            break;
        }
    }
    return g;
}

GraphState entangle_edge(GraphState g, VertexId u, VertexId v) {
    g.add_edge(u, v);
    return g;
}

namespace {

void require_path(const GraphState& g, std::span<const VertexId> chain, const char* name) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (!g.contains(chain[i])) {
            throw std::invalid_argument(std::string(name) + " references unknown vertex " + vertex_name(chain[i]));
        }
        if (i > 0 && !g.has_edge(chain[i - 1], chain[i])) {
            throw std::invalid_argument(std::string(name) + " is not a path in the graph");
        }
    }
}

struct Site {
    VertexId measured = 0;
    VertexId pivot = 0;
    std::vector<VertexId> residual;
};

// Checks that an X-measurement at chain[pos] only touches chain edges and
// returns the pivot together with the chain that remains afterwards.
Site prepare_site(const GraphState& g, std::span<const VertexId> chain, std::size_t pos, const char* name) {
    if (chain.size() < 3 || pos < 1 || pos + 1 >= chain.size()) {
        throw std::invalid_argument(std::string(name) + " position must be interior");
    }
    Site site;
    site.measured = chain[pos];
    if (g.degree(site.measured) != 2) {
        throw std::invalid_argument(std::string(name) + " measured vertex carries non-chain edges");
    }
    site.pivot = *x_measurement_pivot(g, site.measured);
    const std::size_t pivot_pos = site.pivot == chain[pos - 1] ? pos - 1 : pos + 1;
    const std::size_t allowed = (pivot_pos == 0 || pivot_pos + 1 == chain.size()) ? 1 : 2;
    if (g.degree(site.pivot) != allowed) {
        throw std::invalid_argument(std::string(name) + " pivot vertex carries non-chain edges");
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i != pos && i != pivot_pos) {
            site.residual.push_back(chain[i]);
        }
    }
    return site;
}

}  // namespace

VerticalEdgeResult vertical_edge_procedure(const GraphState& g,
                                           std::span<const VertexId> chain_a,
                                           std::size_t pos_a,
                                           std::span<const VertexId> chain_b,
                                           std::size_t pos_b,
                                           GateOutcome outcome,
                                           const EntanglingProcedure& proc,
                                           PauliBasis cleanup) {
    if (!supports_2d_construction(proc)) {
        throw UnsupportedConstruction(proc.name + " loses more than one qubit on failure; vertical edges need c2 <= 1");
    }
    if (cleanup == PauliBasis::X) {
        throw std::invalid_argument("cleanup basis must be Y or Z");
    }
    require_path(g, chain_a, "chain A");
    require_path(g, chain_b, "chain B");
    for (const VertexId v : chain_a) {
        if (std::find(chain_b.begin(), chain_b.end(), v) != chain_b.end()) {
            throw std::invalid_argument("chains share vertex " + vertex_name(v));
        }
    }

    const Site a = prepare_site(g, chain_a, pos_a, "chain A");
    const Site b = prepare_site(g, chain_b, pos_b, "chain B");

    GraphState work = g;
    auto mark = [&work](VertexId v, VertexRole role) {
        VertexLabel label = work.label(v);
        label.role = role;
        work.set_label(v, label);
    };
    mark(a.pivot, VertexRole::Cherry);
    mark(b.pivot, VertexRole::Cherry);
    work = measure(std::move(work), a.measured, PauliBasis::X);
    work = measure(std::move(work), b.measured, PauliBasis::X);

    VerticalEdgeResult result;
    result.cherry_a = a.pivot;
    result.cherry_b = b.pivot;
    result.chain_a = a.residual;
    result.chain_b = b.residual;

    if (outcome == GateOutcome::Failure) {
        work = measure(std::move(work), a.pivot, PauliBasis::Z);
        work = measure(std::move(work), b.pivot, PauliBasis::Z);
    } else {
        work = entangle_edge(std::move(work), a.pivot, b.pivot);
        mark(a.pivot, VertexRole::Intermediate);
        mark(b.pivot, VertexRole::Intermediate);
        work = measure(std::move(work), a.pivot, cleanup);
        work = measure(std::move(work), b.pivot, cleanup);
        for (const VertexId u : result.chain_a) {
            for (const VertexId v : work.neighbors(u)) {
                if (std::find(result.chain_b.begin(), result.chain_b.end(), v) != result.chain_b.end()) {
                    result.vertical_edge = ordered(u, v);
                }
            }
        }
    }
    result.graph = std::move(work);
    return result;
}

namespace {

// Vertices of the pair's residual chains get at most one vertical edge; a
// site needs the pivot, the measured vertex and the vertex that inherits
// the edge to be free of vertical edges.
std::optional<std::size_t> find_site(const std::vector<VertexId>& chain,
                                     std::size_t from,
                                     const std::set<VertexId>& has_vertical) {
    for (std::size_t pos = std::max<std::size_t>(from, 1); pos + 1 < chain.size(); ++pos) {
        if (has_vertical.count(chain[pos - 1]) == 0 && has_vertical.count(chain[pos]) == 0 &&
            has_vertical.count(chain[pos + 1]) == 0) {
            return pos;
        }
    }
    return std::nullopt;
}

// Index that chain[pos + 1] occupies once chain[pos - 1] and chain[pos]
// have been measured out.
std::size_t attach_index(std::size_t pos) { return pos - 1; }

}  // namespace

HoneycombResult build_honeycomb(std::size_t chains,
                                std::size_t chain_length,
                                double p,
                                const EntanglingProcedure& proc,
                                std::uint64_t max_attempts,
                                Rng& rng,
                                PauliBasis cleanup) {
    if (chains < 2) {
        throw std::invalid_argument("honeycomb needs at least two chains");
    }
    if (chain_length < 3) {
        throw std::invalid_argument("chain_length must be >= 3");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in [0, 1]");
    }
    if (max_attempts < 1) {
        throw std::invalid_argument("max_attempts must be >= 1");
    }
    if (!supports_2d_construction(proc)) {
        throw UnsupportedConstruction(proc.name + " loses more than one qubit on failure; vertical edges need c2 <= 1");
    }

    HoneycombResult out;
    out.chains.resize(chains);
    for (std::size_t c = 0; c < chains; ++c) {
        auto& ids = out.chains[c];
        ids.resize(chain_length);
        for (std::size_t i = 0; i < chain_length; ++i) {
            ids[i] = static_cast<VertexId>(c * chain_length + i + 1);
        }
        const GraphState piece = GraphState::path(ids, static_cast<int>(c));
        for (const VertexId v : ids) {
            out.graph.add_vertex(v, piece.label(v));
        }
        for (const auto& [u, v] : piece.edges()) {
            out.graph.add_edge(u, v);
        }
    }

    std::set<VertexId> has_vertical;
    // The upper chain of each pair leaves three free vertices between
    // consecutive sites, enough for the next pair's site; this is what makes
    // the vertical edges alternate in direction along inner chains.
    constexpr std::size_t kStride = 5;

    for (std::size_t c = 0; c + 1 < chains && out.complete; ++c) {
        auto& lower = out.chains[c];
        auto& upper = out.chains[c + 1];
        std::size_t cursor_lower = 1;
        std::size_t cursor_upper = 1 + (c % 2);
        std::uint64_t tries = 0;
        for (;;) {
            const auto pos_lower = find_site(lower, cursor_lower, has_vertical);
            const auto pos_upper = find_site(upper, cursor_upper, has_vertical);
            if (!pos_lower || !pos_upper) {
                break;
            }
            if (tries == max_attempts) {
                out.complete = false;
                break;
            }
            ++tries;
            ++out.attempts;
            const GateOutcome outcome = rng.bernoulli(p) ? GateOutcome::Success : GateOutcome::Failure;
            VerticalEdgeResult step =
                vertical_edge_procedure(out.graph, lower, *pos_lower, upper, *pos_upper, outcome, proc, cleanup);
            out.graph = std::move(step.graph);
            lower = std::move(step.chain_a);
            upper = std::move(step.chain_b);
            cursor_lower = *pos_lower;
            cursor_upper = *pos_upper;
            if (step.vertical_edge) {
                has_vertical.insert(step.vertical_edge->first);
                has_vertical.insert(step.vertical_edge->second);
                out.vertical_edges.push_back({*step.vertical_edge, c, tries});
                tries = 0;
                cursor_lower = attach_index(*pos_lower) + 1;
                cursor_upper = attach_index(*pos_upper) + kStride;
            }
        }
    }

    std::size_t total = 0;
    for (const auto& chain : out.chains) {
        total += chain.size();
    }
    out.coverage = total == 0 ? 0.0 : static_cast<double>(has_vertical.size()) / static_cast<double>(total);
    return out;
}

namespace {

using Rows = std::array<std::uint16_t, kMaxLcVertices>;

struct Dense {
    std::size_t n = 0;
    Rows rows{};
};

Dense to_dense(const GraphState& g) {
    Dense d;
    d.n = g.vertex_count();
    const std::vector<VertexId> ids = g.vertices();
    for (std::size_t i = 0; i < d.n; ++i) {
        for (const VertexId w : g.neighbors(ids[i])) {
            const auto j = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), w) - ids.begin());
            d.rows[i] |= static_cast<std::uint16_t>(1u << j);
        }
    }
    return d;
}

void lc_dense(Rows& rows, std::size_t v) {
    const std::uint16_t nv = rows[v];
    for (std::size_t u = 0; u < kMaxLcVertices; ++u) {
        if ((nv >> u) & 1u) {
            rows[u] ^= static_cast<std::uint16_t>(nv & ~(1u << u));
        }
    }
}

// Packs the strict upper triangle (at most 66 bits) into two words.
struct Key {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const { return static_cast<std::size_t>(splitmix64(k.lo ^ splitmix64(k.hi))); }
};

Key pack(const Rows& rows, std::size_t n) {
    Key k;
    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++bit) {
            if ((rows[i] >> j) & 1u) {
                if (bit < 64) {
                    k.lo |= std::uint64_t{1} << bit;
                } else {
                    k.hi |= std::uint64_t{1} << (bit - 64);
                }
            }
        }
    }
    return k;
}

std::vector<int> sorted_degrees(const Rows& rows, std::size_t n) {
    std::vector<int> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = __builtin_popcount(rows[i]);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<std::size_t> component_sizes(const Rows& rows, std::size_t n) {
    std::vector<std::size_t> sizes;
    std::uint32_t seen = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if ((seen >> s) & 1u) {
            continue;
        }
        std::uint32_t comp = 1u << s;
        std::uint32_t frontier = comp;
        while (frontier != 0) {
            std::uint32_t next = 0;
            for (std::size_t v = 0; v < n; ++v) {
                if ((frontier >> v) & 1u) {
                    next |= rows[v];
                }
            }
            frontier = next & ~comp;
            comp |= next;
        }
        seen |= comp;
        sizes.push_back(static_cast<std::size_t>(__builtin_popcount(comp)));
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

class IsoMatcher {
public:
    explicit IsoMatcher(const Dense& target) : target_(target) {
        for (std::size_t i = 0; i < target_.n; ++i) {
            target_degree_[i] = __builtin_popcount(target_.rows[i]);
        }
        target_sorted_ = sorted_degrees(target_.rows, target_.n);
    }

    bool matches(const Rows& rows) {
        if (sorted_degrees(rows, target_.n) != target_sorted_) {
            return false;
        }
        rows_ = &rows;
        for (std::size_t i = 0; i < target_.n; ++i) {
            degree_[i] = __builtin_popcount(rows[i]);
        }
        used_ = 0;
        return extend(0);
    }

private:
    bool extend(std::size_t i) {
        const std::size_t n = target_.n;
        if (i == n) {
            return true;
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (((used_ >> t) & 1u) || target_degree_[t] != degree_[i]) {
                continue;
            }
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j) {
                const bool here = ((*rows_)[i] >> j) & 1u;
                const bool there = (target_.rows[t] >> map_[j]) & 1u;
                ok = here == there;
            }
            if (!ok) {
                continue;
            }
            map_[i] = t;
            used_ |= 1u << t;
            if (extend(i + 1)) {
                return true;
            }
            used_ &= ~(1u << t);
        }
        return false;
    }

    Dense target_;
    std::array<int, kMaxLcVertices> target_degree_{};
    std::vector<int> target_sorted_;
    const Rows* rows_ = nullptr;
    std::array<int, kMaxLcVertices> degree_{};
    std::array<std::size_t, kMaxLcVertices> map_{};
    std::uint32_t used_ = 0;
};

void guard_size(const GraphState& g) {
    if (g.vertex_count() > kMaxLcVertices) {
        throw CapacityError("graph has " + std::to_string(g.vertex_count()) + " vertices; LC search is limited to " +
                            std::to_string(kMaxLcVertices));
    }
}

}  // namespace

bool isomorphic(const GraphState& g1, const GraphState& g2) {
    guard_size(g1);
    guard_size(g2);
    if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) {
        return false;
    }
    const Dense a = to_dense(g1);
    IsoMatcher matcher(to_dense(g2));
    return matcher.matches(a.rows);
}

bool lc_equivalent(const GraphState& g1, const GraphState& g2, std::size_t orbit_limit) {
    guard_size(g1);
    guard_size(g2);
    if (g1.vertex_count() != g2.vertex_count()) {
        return false;
    }
    const Dense start = to_dense(g1);
    const Dense target = to_dense(g2);
    const std::size_t n = start.n;
    // LC acts inside a connected component and never splits or joins one.
    if (component_sizes(start.rows, n) != component_sizes(target.rows, n)) {
        return false;
    }

    IsoMatcher matcher(target);
    std::unordered_set<Key, KeyHash> seen;
    std::deque<Rows> queue;
    seen.insert(pack(start.rows, n));
    queue.push_back(start.rows);
    while (!queue.empty()) {
        const Rows rows = queue.front();
        queue.pop_front();
        if (matcher.matches(rows)) {
            return true;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (__builtin_popcount(rows[v]) < 2) {
                continue;
            }
            Rows next = rows;
            lc_dense(next, v);
            if (seen.insert(pack(next, n)).second) {
                if (seen.size() > orbit_limit) {
                    throw CapacityError("LC orbit exceeded " + std::to_string(orbit_limit) + " graphs");
                }
                queue.push_back(next);
            }
        }
    }
    return false;
}

std::string to_dot(const GraphState& g) {
    std::ostringstream os;
    os << "graph cluster {\n";
    for (const VertexId v : g.vertices()) {
        const VertexLabel& label = g.label(v);
        os << "  " << v << " [role=\"" << to_string(label.role) << '"';
        if (label.chain) {
            os << ", chain=" << *label.chain;
        }
        if (label.position) {
            os << ", position=" << *label.position;
        }
        os << "];\n";
    }
    for (const auto& [u, v] : g.edges()) {
        os << "  " << u << " -- " << v << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string to_json(const GraphState& g) {
    nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
    for (const VertexId v : g.vertices()) {
        const VertexLabel& label = g.label(v);
        nlohmann::ordered_json entry;
        entry["id"] = v;
        entry["neighbors"] = std::vector<VertexId>(g.neighbors(v).begin(), g.neighbors(v).end());
        entry["role"] = to_string(label.role);
        entry["chain"] = label.chain ? nlohmann::ordered_json(*label.chain) : nlohmann::ordered_json(nullptr);
        entry["position"] = label.position ? nlohmann::ordered_json(*label.position) : nlohmann::ordered_json(nullptr);
        vertices.push_back(std::move(entry));
    }
    nlohmann::ordered_json doc;
    doc["vertices"] = std::move(vertices);
    return doc.dump(2) + "\n";
}

}  // namespace jitcluster
