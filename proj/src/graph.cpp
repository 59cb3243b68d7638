#include "slp/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "slp/common.hpp"

namespace slp {

Graph Graph::from_edge_list(std::span<const std::pair<NodeId, NodeId>> pairs,
                            NodeId n) {
    if (n < 0) throw ConfigError("graph: node count must be non-negative");
    std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(n));
    for (const auto& [u, v] : pairs) {
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw DataError("graph: edge (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") out of range for n = " +
                            std::to_string(n));
        }
        if (u == v) continue;  // self-pairs dropped
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    Graph g;
    g.n_ = n;
    g.offsets_.assign(1, 0);
    g.offsets_.reserve(static_cast<std::size_t>(n) + 1);
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        g.neighbors_.insert(g.neighbors_.end(), list.begin(), list.end());
        g.offsets_.push_back(static_cast<std::int64_t>(g.neighbors_.size()));
    }
    return g;
}

std::int64_t Graph::num_edges() const {
    std::int64_t directed = static_cast<std::int64_t>(neighbors_.size());
    if (!has_self_loops_) return directed / 2;
    // Each of the n_ loops appears once in the lists, every other edge twice.
    return (directed - n_) / 2 + n_;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

Graph set_self_loops(const Graph& g, bool enabled) {
    if (enabled == g.has_self_loops_) return g;
    Graph out;
    out.n_ = g.n_;
    out.has_self_loops_ = enabled;
    out.node_ids_ = g.node_ids_;
    out.offsets_.assign(1, 0);
    out.offsets_.reserve(static_cast<std::size_t>(g.n_) + 1);
    out.neighbors_.reserve(g.neighbors_.size() +
                           (enabled ? static_cast<std::size_t>(g.n_) : 0));
    for (NodeId v = 0; v < g.n_; ++v) {
        auto nb = g.neighbors(v);
        if (enabled) {
            auto pos = std::lower_bound(nb.begin(), nb.end(), v);
            out.neighbors_.insert(out.neighbors_.end(), nb.begin(), pos);
            out.neighbors_.push_back(v);
            out.neighbors_.insert(out.neighbors_.end(), pos, nb.end());
        } else {
            for (NodeId u : nb)
                if (u != v) out.neighbors_.push_back(u);
        }
        out.offsets_.push_back(static_cast<std::int64_t>(out.neighbors_.size()));
    }
    return out;
}

Graph subgraph(const Graph& g, const std::vector<bool>& keep) {
    if (keep.size() != static_cast<std::size_t>(g.n_))
        throw ConfigError("subgraph: keep mask size mismatch");
    std::vector<NodeId> remap(static_cast<std::size_t>(g.n_), -1);
    std::vector<NodeId> kept;
    for (NodeId v = 0; v < g.n_; ++v) {
        if (keep[static_cast<std::size_t>(v)]) {
            remap[static_cast<std::size_t>(v)] =
                static_cast<NodeId>(kept.size());
            kept.push_back(v);
        }
    }
    Graph out;
    out.n_ = static_cast<NodeId>(kept.size());
    out.has_self_loops_ = g.has_self_loops_;
    out.offsets_.assign(1, 0);
    out.offsets_.reserve(kept.size() + 1);
    for (NodeId v : kept) {
        for (NodeId u : g.neighbors(v)) {
            NodeId r = remap[static_cast<std::size_t>(u)];
            if (r >= 0) out.neighbors_.push_back(r);
        }
        out.offsets_.push_back(static_cast<std::int64_t>(out.neighbors_.size()));
    }
    // Compose with any earlier reindexing so node_ids always points at the
    // graph as originally loaded.
    out.node_ids_.reserve(kept.size());
    for (NodeId v : kept) {
        out.node_ids_.push_back(g.node_ids_.empty()
                                    ? v
                                    : g.node_ids_[static_cast<std::size_t>(v)]);
    }
    return out;
}

Graph remove_isolated(const Graph& g) {
    std::vector<bool> keep(static_cast<std::size_t>(g.num_nodes()), false);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        for (NodeId u : g.neighbors(v)) {
            if (u != v) {
                keep[static_cast<std::size_t>(v)] = true;
                break;
            }
        }
    }
    return subgraph(g, keep);
}

Graph largest_component(const Graph& g) {
    const NodeId n = g.num_nodes();
    std::vector<NodeId> component(static_cast<std::size_t>(n), -1);
    NodeId num_components = 0;
    std::vector<NodeId> stack;
    for (NodeId start = 0; start < n; ++start) {
        if (component[static_cast<std::size_t>(start)] >= 0) continue;
        NodeId c = num_components++;
        component[static_cast<std::size_t>(start)] = c;
        stack.assign(1, start);
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId u : g.neighbors(v)) {
                if (component[static_cast<std::size_t>(u)] < 0) {
                    component[static_cast<std::size_t>(u)] = c;
                    stack.push_back(u);
                }
            }
        }
    }
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(num_components), 0);
    for (NodeId v = 0; v < n; ++v)
        ++sizes[static_cast<std::size_t>(component[static_cast<std::size_t>(v)])];
    // First maximal component wins; components are discovered in order of
    // their smallest node, so ties resolve to the smallest contained index.
    NodeId best = 0;
    for (NodeId c = 1; c < num_components; ++c) {
        if (sizes[static_cast<std::size_t>(c)] >
            sizes[static_cast<std::size_t>(best)])
            best = c;
    }
    std::vector<bool> keep(static_cast<std::size_t>(n), false);
    for (NodeId v = 0; v < n; ++v)
        keep[static_cast<std::size_t>(v)] =
            component[static_cast<std::size_t>(v)] == best;
    return subgraph(g, keep);
}

DegreeStats degree_stats(const Graph& g) {
    const NodeId n = g.num_nodes();
    if (n == 0) throw NumericError("degree_stats: empty graph");
    double sum_d = 0.0;
    double sum_d2 = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        double d = static_cast<double>(g.degree(v));
        sum_d += d;
        sum_d2 += d * d;
    }
    DegreeStats s;
    s.n = n;
    s.mean_degree = sum_d / static_cast<double>(n);
    s.mean_sq_degree = sum_d2 / static_cast<double>(n);
    if (sum_d == 0.0)
        throw NumericError("degree_stats: graph has no edges, <d_N> undefined");
    s.mean_neighbor_degree = s.mean_sq_degree / s.mean_degree;
    return s;
}

Graph read_edge_list(std::istream& in, NodeId n,
                     const std::string& source_name) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    NodeId max_id = -1;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ls(line.substr(start));
        long long u = 0, v = 0;
        if (!(ls >> u >> v)) {
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": expected two integers, got \"" + line + "\"");
        }
        std::string trailing;
        if (ls >> trailing && !trailing.empty() && trailing[0] != '#') {
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": trailing content \"" + trailing + "\"");
        }
        if (u < 0 || v < 0) {
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": negative node id");
        }
        pairs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        max_id = std::max({max_id, static_cast<NodeId>(u),
                           static_cast<NodeId>(v)});
    }
    if (in.bad()) throw DataError(source_name + ": read failure");
    if (n < 0) n = max_id + 1;
    return Graph::from_edge_list(pairs, n);
}

Graph read_edge_list_file(const std::string& path, NodeId n) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list: " + path);
    return read_edge_list(in, n, path);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        for (NodeId u : g.neighbors(v)) {
            if (u > v) out << v << ' ' << u << '\n';
        }
    }
}

}  // namespace slp
