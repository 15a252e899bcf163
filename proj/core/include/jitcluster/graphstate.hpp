#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jitcluster/gates.hpp"
#include "jitcluster/random.hpp"

namespace jitcluster {

using VertexId = std::uint32_t;
using Edge = std::pair<VertexId, VertexId>;  // always first < second

enum class VertexRole { Chain, Cherry, Intermediate };
enum class PauliBasis { X, Y, Z };
enum class GateOutcome { Success, Failure };

const char* to_string(VertexRole role);
const char* to_string(PauliBasis basis);

struct VertexLabel {
    std::optional<int> chain;
    std::optional<int> position;
    VertexRole role = VertexRole::Chain;

    friend bool operator==(const VertexLabel&, const VertexLabel&) = default;
};

/// Simple undirected graph standing for a stabilizer graph state. Local
/// Clifford corrections produced by measurements are not tracked.
class GraphState {
public:
    /// Path over `ids` in order, labelled with chain index and position.
    static GraphState path(std::span<const VertexId> ids, std::optional<int> chain = std::nullopt);
    /// Path over first, first + 1, ..., first + length - 1.
    static GraphState path(VertexId first, std::size_t length, std::optional<int> chain = std::nullopt);

    void add_vertex(VertexId v, VertexLabel label = {});
    void add_edge(VertexId u, VertexId v);
    void remove_edge(VertexId u, VertexId v);
    void toggle_edge(VertexId u, VertexId v);
    void remove_vertex(VertexId v);

    bool contains(VertexId v) const { return nodes_.count(v) != 0; }
    bool has_edge(VertexId u, VertexId v) const;
    const std::set<VertexId>& neighbors(VertexId v) const;
    std::size_t degree(VertexId v) const { return neighbors(v).size(); }
    std::size_t vertex_count() const { return nodes_.size(); }
    std::size_t edge_count() const;
    std::vector<VertexId> vertices() const;
    std::vector<Edge> edges() const;

    const VertexLabel& label(VertexId v) const;
    void set_label(VertexId v, VertexLabel label);

    /// Complements the edge set inside the neighbourhood of v.
    void local_complement_in_place(VertexId v);

    /// Equal adjacency; labels are ignored.
    bool same_edges(const GraphState& other) const;

private:
    struct Node {
        VertexLabel label;
        std::set<VertexId> adjacent;
    };

    Node& node(VertexId v);
    const Node& node(VertexId v) const;

    std::map<VertexId, Node> nodes_;
};

GraphState local_complement(GraphState g, VertexId v);

/// Lowest-id neighbour of v: the pivot used by the X-measurement rule.
std::optional<VertexId> x_measurement_pivot(const GraphState& g, VertexId v);

/// Pauli measurement rules on graph states.
///   Z: delete v.
///   Y: local complement at v, then delete v.
///   X: if v is isolated delete it; otherwise with pivot b0 apply
///      LC(b0), the Y rule at v, then LC(b0) again.
GraphState measure(GraphState g, VertexId v, PauliBasis basis);

/// Adds the edge {u, v}; rejects u == v and existing edges.
GraphState entangle_edge(GraphState g, VertexId u, VertexId v);

struct VerticalEdgeResult {
    GraphState graph;
    std::vector<VertexId> chain_a;  // residual chains, in path order
    std::vector<VertexId> chain_b;
    VertexId cherry_a = 0;
    VertexId cherry_b = 0;
    std::optional<Edge> vertical_edge;
};

/// Attempts one vertical edge between two chains.
///
/// X-measures chain_a[pos_a] and chain_b[pos_b] so each chain sheds two
/// vertices and keeps a cherry. On failure both cherries are Z-measured. On
/// success the cherries are entangled and then measured in `cleanup`; with
/// Y this leaves a single edge between the two chains. Positions are
/// 0-based and must be interior. The measured vertex and the pivot may only
/// carry chain edges. Throws UnsupportedConstruction for gates with c2 > 1.
VerticalEdgeResult vertical_edge_procedure(const GraphState& g,
                                           std::span<const VertexId> chain_a,
                                           std::size_t pos_a,
                                           std::span<const VertexId> chain_b,
                                           std::size_t pos_b,
                                           GateOutcome outcome,
                                           const EntanglingProcedure& proc,
                                           PauliBasis cleanup = PauliBasis::Y);

struct VerticalEdge {
    Edge edge;
    std::size_t lower_chain = 0;  // joins lower_chain and lower_chain + 1
    std::uint64_t attempts = 0;
};

struct HoneycombResult {
    GraphState graph;
    std::vector<std::vector<VertexId>> chains;
    std::vector<VerticalEdge> vertical_edges;
    std::uint64_t attempts = 0;
    bool complete = true;  // false when a site exhausted max_attempts
    double coverage = 0;   // fraction of chain vertices with a vertical edge
};

/// Stitches `chains` parallel chains into a honeycomb fragment. Chain c
/// holds vertices c * chain_length + 1 ... (c + 1) * chain_length. Adjacent
/// chain pairs are processed in order. Sites on a chain are spaced so the
/// next pair can place its edges in between, which alternates the vertical
/// edges up and down along each inner chain (the brick-wall form of the
/// honeycomb lattice).
HoneycombResult build_honeycomb(std::size_t chains,
                                std::size_t chain_length,
                                double p,
                                const EntanglingProcedure& proc,
                                std::uint64_t max_attempts,
                                Rng& rng,
                                PauliBasis cleanup = PauliBasis::Y);

/// Largest graph accepted by lc_equivalent.
inline constexpr std::size_t kMaxLcVertices = 12;

/// True iff some graph in the local-complementation orbit of g1 is
/// isomorphic to g2. Explores the labelled orbit breadth-first, deduplicated
/// on the packed adjacency matrix. Throws CapacityError above
/// kMaxLcVertices vertices or when the orbit outgrows orbit_limit.
bool lc_equivalent(const GraphState& g1, const GraphState& g2, std::size_t orbit_limit = std::size_t{1} << 19);

bool isomorphic(const GraphState& g1, const GraphState& g2);

std::string to_dot(const GraphState& g);
/// Byte-stable JSON adjacency list: vertices by ascending id, sorted
/// neighbour lists.
std::string to_json(const GraphState& g);

}  // namespace jitcluster
