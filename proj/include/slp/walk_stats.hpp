#pragma once

#include <cstdint>
#include <vector>

#include "slp/graph.hpp"

namespace slp {

// Exact per-node walk counts at one length k, held as doubles. Every count
// stays below 2^53 so the values are exact integers.
struct WalkCounts {
    int k = 0;
    std::vector<double> closed;    // A^k_vv
    std::vector<double> total_in;  // sum_u A^k_uv
};

// Per-node proportions closed[v] / total_in[v] and their node-level spread.
struct ProportionReport {
    int k = 0;
    bool self_loops = false;
    std::vector<double> per_node;
    double mean = 0.0;
    double std = 0.0;  // population
};

// The length-2 comparison between a loop-free graph and its counterpart
// with self-loops. holds_analytically is a tautology of the estimators
// (it reduces to <d>^2 + <d> > 0) and is reported for auditability.
struct ParadoxVerdict {
    int k = 2;
    double empirical_without = 0.0;
    double empirical_with = 0.0;
    double estimate_without = 0.0;
    double estimate_with = 0.0;
    bool holds_empirically = false;
    bool holds_analytically = false;
};

// Exact walk counts for k = 1..k_max by repeated sparse-times-dense
// application of the adjacency to the identity. Throws NumericError naming
// the offending k as soon as any count would pass 2^53.
std::vector<WalkCounts> walk_counts(const Graph& g, int k_max);

// Independent oracle: counts walks from u to v of length k by explicit
// depth-k traversal. Bounded to n <= 12, k <= 6; throws ConfigError beyond.
std::int64_t brute_force_walks(const Graph& g, NodeId u, NodeId v, int k);

// Proportions for k = 1..k_max. A node with total_in = 0 at some k makes
// the proportion undefined and throws NumericError naming node and k.
std::vector<ProportionReport> proportions(const Graph& g, int k_max);

// Analytical estimate of the mean k=1 proportion: 0 without self-loops,
// 1/(<d>+1) with. stats must come from the loop-free graph.
double estimate_k1(const DegreeStats& stats, bool self_loops);

// Analytical estimate of the mean k=2 proportion: <d>/<d^2> without
// self-loops, (<d>+1)/(<d^2> + <d> + <d^2>/<d> + 1) with. stats must come
// from the loop-free graph.
double estimate_k2(const DegreeStats& stats, bool self_loops);

// Expected total number of k-length walks ending at a node:
// <d> * (<d^2>/<d>)^(k-1).
double expected_total_walks(const DegreeStats& stats, int k);

// Full length-2 comparison on a loop-free graph without isolated nodes.
ParadoxVerdict paradox_verdict(const Graph& g);

}  // namespace slp
