#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "slp/graph.hpp"
#include "slp/rng.hpp"

namespace slp::test {

// Erdos-Renyi style random simple graph (possibly disconnected).
inline Graph random_graph(Rng& rng, NodeId n, double p) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) pairs.emplace_back(u, v);
    return Graph::from_edge_list(pairs, n);
}

// Random graph with a path backbone so no node is isolated (n >= 2).
inline Graph random_graph_no_isolated(Rng& rng, NodeId n, double p) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId v = 0; v + 1 < n; ++v) pairs.emplace_back(v, v + 1);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 2; v < n; ++v)
            if (rng.bernoulli(p)) pairs.emplace_back(u, v);
    return Graph::from_edge_list(pairs, n);
}

inline Graph path2() {
    std::vector<std::pair<NodeId, NodeId>> pairs{{0, 1}};
    return Graph::from_edge_list(pairs, 2);
}

inline Graph triangle() {
    std::vector<std::pair<NodeId, NodeId>> pairs{{0, 1}, {0, 2}, {1, 2}};
    return Graph::from_edge_list(pairs, 3);
}

// Star with center 0 and three leaves; degree sequence (3, 1, 1, 1).
inline Graph star3() {
    std::vector<std::pair<NodeId, NodeId>> pairs{{0, 1}, {0, 2}, {0, 3}};
    return Graph::from_edge_list(pairs, 4);
}

inline Graph complete(NodeId n) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    return Graph::from_edge_list(pairs, n);
}

inline Graph cycle(NodeId n) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId v = 0; v < n; ++v)
        pairs.emplace_back(v, static_cast<NodeId>((v + 1) % n));
    return Graph::from_edge_list(pairs, n);
}

// Fresh scratch directory under the test working directory.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::path("slp_test_tmp") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace slp::test
