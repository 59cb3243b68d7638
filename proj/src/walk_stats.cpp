#include "slp/walk_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slp/common.hpp"
#include "slp/stats_util.hpp"

namespace slp {

namespace {

// Largest double at which integer arithmetic is still exact.
constexpr double kExactLimit = 9007199254740992.0;  // 2^53

}  // namespace

std::vector<WalkCounts> walk_counts(const Graph& g, int k_max) {
    if (k_max < 1) throw ConfigError("walk_counts: k_max must be >= 1");
    const NodeId n = g.num_nodes();
    if (n == 0) throw ConfigError("walk_counts: empty graph");
    const auto nn = static_cast<std::size_t>(n);

    // power holds A^k row-major; nonnegative integer entries mean partial
    // sums never exceed the final value, so checking finals against 2^53
    // guarantees exactness throughout.
    std::vector<double> power(nn * nn, 0.0);
    std::vector<double> next(nn * nn, 0.0);
    for (std::size_t v = 0; v < nn; ++v) power[v * nn + v] = 1.0;

    std::vector<WalkCounts> out;
    out.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (NodeId v = 0; v < n; ++v) {
            double* row = next.data() + static_cast<std::size_t>(v) * nn;
            for (NodeId u : g.neighbors(v)) {
                const double* src =
                    power.data() + static_cast<std::size_t>(u) * nn;
                for (std::size_t j = 0; j < nn; ++j) row[j] += src[j];
            }
        }
        power.swap(next);

        WalkCounts wc;
        wc.k = k;
        wc.closed.resize(nn);
        wc.total_in.assign(nn, 0.0);
        double max_value = 0.0;
        for (std::size_t u = 0; u < nn; ++u) {
            const double* row = power.data() + u * nn;
            for (std::size_t v = 0; v < nn; ++v) {
                wc.total_in[v] += row[v];
                max_value = std::max(max_value, row[v]);
            }
            wc.closed[u] = row[u];
        }
        for (double t : wc.total_in) max_value = std::max(max_value, t);
        if (max_value > kExactLimit)
            throw NumericError("walk_counts: counts exceed 2^53 at k = " +
                               std::to_string(k));
        out.push_back(std::move(wc));
    }
    return out;
}

namespace {

std::int64_t count_walks_from(const Graph& g, NodeId node, NodeId target,
                              int steps_left) {
    if (steps_left == 0) return node == target ? 1 : 0;
    std::int64_t total = 0;
    for (NodeId u : g.neighbors(node))
        total += count_walks_from(g, u, target, steps_left - 1);
    return total;
}

}  // namespace

std::int64_t brute_force_walks(const Graph& g, NodeId u, NodeId v, int k) {
    if (g.num_nodes() > 12 || k > 6)
        throw ConfigError("brute_force_walks: oracle bound n <= 12, k <= 6 "
                          "exceeded");
    if (k < 0) throw ConfigError("brute_force_walks: negative length");
    if (u < 0 || v < 0 || u >= g.num_nodes() || v >= g.num_nodes())
        throw ConfigError("brute_force_walks: node out of range");
    return count_walks_from(g, u, v, k);
}

std::vector<ProportionReport> proportions(const Graph& g, int k_max) {
    auto counts = walk_counts(g, k_max);
    std::vector<ProportionReport> out;
    out.reserve(counts.size());
    for (const auto& wc : counts) {
        ProportionReport r;
        r.k = wc.k;
        r.self_loops = g.has_self_loops();
        r.per_node.resize(wc.closed.size());
        for (std::size_t v = 0; v < wc.closed.size(); ++v) {
            if (wc.total_in[v] == 0.0)
                throw NumericError("proportions: node " + std::to_string(v) +
                                   " has no incoming walks at k = " +
                                   std::to_string(wc.k));
            r.per_node[v] = wc.closed[v] / wc.total_in[v];
        }
        r.mean = mean(r.per_node);
        r.std = population_std(r.per_node);
        out.push_back(std::move(r));
    }
    return out;
}

double estimate_k1(const DegreeStats& stats, bool self_loops) {
    if (!self_loops) return 0.0;
    return 1.0 / (stats.mean_degree + 1.0);
}

double estimate_k2(const DegreeStats& stats, bool self_loops) {
    if (stats.mean_degree <= 0.0)
        throw NumericError("estimate_k2: <d> must be positive");
    if (!self_loops) return stats.mean_degree / stats.mean_sq_degree;
    // Adding the identity raises both <d> and <d_N> by one, so the expected
    // closed count becomes <d>+1 and the expected total
    // (<d>+1) * (<d_N>+1) = <d^2> + <d> + <d^2>/<d> + 1.
    return (stats.mean_degree + 1.0) /
           (stats.mean_sq_degree + stats.mean_degree +
            stats.mean_sq_degree / stats.mean_degree + 1.0);
}

double expected_total_walks(const DegreeStats& stats, int k) {
    if (k < 1) throw ConfigError("expected_total_walks: k must be >= 1");
    if (stats.mean_degree <= 0.0)
        throw NumericError("expected_total_walks: <d> must be positive");
    return stats.mean_degree *
           std::pow(stats.mean_sq_degree / stats.mean_degree, k - 1);
}

ParadoxVerdict paradox_verdict(const Graph& g) {
    if (g.has_self_loops())
        throw ConfigError("paradox_verdict: expects the loop-free graph");
    auto stats = degree_stats(g);
    auto without = proportions(g, 2);
    auto with = proportions(set_self_loops(g, true), 2);
    ParadoxVerdict v;
    v.k = 2;
    v.empirical_without = without[1].mean;
    v.empirical_with = with[1].mean;
    v.estimate_without = estimate_k2(stats, false);
    v.estimate_with = estimate_k2(stats, true);
    v.holds_empirically = v.empirical_without > v.empirical_with;
    v.holds_analytically = v.estimate_without > v.estimate_with;
    return v;
}

}  // namespace slp
