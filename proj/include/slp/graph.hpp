#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace slp {

using NodeId = std::int32_t;

// Mean degree statistics of a realized graph: <d>, <d^2> and the expected
// degree of a random neighbour <d_N> = <d^2>/<d>.
struct DegreeStats {
    double mean_degree = 0.0;
    double mean_sq_degree = 0.0;
    double mean_neighbor_degree = 0.0;
    NodeId n = 0;
};

// Undirected graph in compressed sparse adjacency form. Immutable after
// construction; all transforms return new graphs.
//
// Invariants:
//  - adjacency is symmetric and each neighbor list is sorted and duplicate
//    free (simple graph apart from self-loops),
//  - if has_self_loops() every list contains its own node exactly once,
//    otherwise no list does,
//  - a self-loop contributes exactly 1 to degree(v).
class Graph {
public:
    Graph() = default;

    // Builds an undirected graph from (u, v) pairs. Pairs are inserted in
    // both directions, duplicates collapse and self-pairs are dropped.
    static Graph from_edge_list(std::span<const std::pair<NodeId, NodeId>> pairs,
                                NodeId n);

    NodeId num_nodes() const { return n_; }
    bool has_self_loops() const { return has_self_loops_; }

    // Number of undirected edges; a self-loop counts as one edge.
    std::int64_t num_edges() const;

    std::span<const NodeId> neighbors(NodeId v) const {
        return {neighbors_.data() + offsets_[static_cast<std::size_t>(v)],
                neighbors_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
    }

    NodeId degree(NodeId v) const {
        return static_cast<NodeId>(offsets_[static_cast<std::size_t>(v) + 1] -
                                   offsets_[static_cast<std::size_t>(v)]);
    }

    bool has_edge(NodeId u, NodeId v) const;

    // Original node ids after a reindexing transform (remove_isolated,
    // largest_component); empty means the identity mapping.
    const std::vector<NodeId>& node_ids() const { return node_ids_; }

    bool operator==(const Graph& other) const = default;

private:
    friend Graph set_self_loops(const Graph& g, bool enabled);
    friend Graph subgraph(const Graph& g, const std::vector<bool>& keep);

    NodeId n_ = 0;
    bool has_self_loops_ = false;
    std::vector<std::int64_t> offsets_{0};  // size n+1
    std::vector<NodeId> neighbors_;         // sorted per node
    std::vector<NodeId> node_ids_;
};

// Returns a graph whose adjacency equals A + I if enabled, A otherwise.
// Idempotent; everything else (including node_ids) is preserved.
Graph set_self_loops(const Graph& g, bool enabled);

// Removes nodes without any non-self neighbor and reindexes densely.
// node_ids() of the result maps new indices back to the original ones.
Graph remove_isolated(const Graph& g);

// Keeps only the largest connected component (ties broken by smallest
// contained node index). Self-loops do not connect anything.
Graph largest_component(const Graph& g);

// Induced subgraph on the kept nodes; composes node_ids through g.
Graph subgraph(const Graph& g, const std::vector<bool>& keep);

// Degree statistics; a self-loop adds 1 to its node's degree. Throws
// NumericError for an edgeless graph (<d_N> undefined).
DegreeStats degree_stats(const Graph& g);

// --- edge list text format ------------------------------------------------
// One "u v" whitespace-separated integer pair per line; lines beginning with
// '#' and blank lines are ignored. Node count inferred as max index + 1
// unless given explicitly (n >= 0).

Graph read_edge_list(std::istream& in, NodeId n = -1,
                     const std::string& source_name = "<stream>");
Graph read_edge_list_file(const std::string& path, NodeId n = -1);

// Writes the loop-free skeleton, one undirected edge per line (u <= v).
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace slp
