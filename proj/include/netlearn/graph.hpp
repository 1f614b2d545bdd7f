// graph.hpp — communication graphs, weight matrices, and time-varying
// graph sequences.
//
// Node indexing is 0-based everywhere, including the external file format.
// A snapshot is one undirected simple graph (no self-loops); a sequence is a
// pure function t -> snapshot for t >= 1 with a declared connectivity window
// B: the edge union over each window [kB+1, (k+1)B] is expected to be
// connected (checkable with verify_b_connectivity).
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "netlearn/linalg.hpp"
#include "netlearn/rng.hpp"

namespace netlearn {

class GraphSnapshot {
public:
    // Validates endpoints, rejects self-loops, dedups unordered pairs.
    GraphSnapshot(int n, std::vector<std::pair<int, int>> edges);
    GraphSnapshot() = default;

    int n() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; } // i<j, sorted
    const std::vector<int>& neighbors(int i) const { return adj_[i]; }       // ascending
    int degree(int i) const { return static_cast<int>(adj_[i].size()); }
    // 1/max(d_i, d_j) for the k'th neighbor of i; aligned with neighbors(i).
    const std::vector<double>& inv_max_degree(int i) const { return adj_w_[i]; }

    bool is_connected() const;

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<double>> adj_w_;
};

// Normalized construction from a raw edge list (errors on self-loops and
// out-of-range endpoints).
GraphSnapshot build_graph(int n, const std::vector<std::pair<int, int>>& edges);

enum class WeightKind { metropolis, protocol, lazy_walk };

struct WeightMatrix {
    Matrix m;
    WeightKind kind;
};

// Symmetric stochastic matrix with off-diagonal 1/max(d_i, d_j) on edges and
// diagonal complement (isolated nodes get diagonal 1).
WeightMatrix metropolis_matrix(const GraphSnapshot& g);

// Update matrix of one protocol step: off-diagonal 1/(4 max(d_i, d_j)) on
// edges; diagonal complements the row to 1 for non-measuring nodes and to
// 3/4 for measuring nodes. Symmetric and diagonally dominant.
WeightMatrix protocol_matrix(const GraphSnapshot& g, const std::vector<int>& measuring);

enum class GraphFamily { complete, line, star, lollipop, grid2d };

GraphFamily parse_family(const std::string& name);
std::string family_name(GraphFamily f);

// Canonical topologies. Star center is node 0; line endpoints are 0 and n-1;
// the lollipop is a complete graph on nodes 0..n/2-1 with a path hanging off
// node n/2-1 and ending at node n-1 (the sampling end of the stem).
GraphSnapshot generate(GraphFamily family, int n);
GraphSnapshot generate_grid(int rows, int cols);

// The node that samples by convention in single-measurer experiments:
// n-1 for line and lollipop, 0 otherwise.
int canonical_measuring_node(GraphFamily family, int n);

// Random connected graph: uniform random spanning tree skeleton plus
// extra_edges random distinct non-tree edges. Deterministic in rng state.
GraphSnapshot random_connected_graph(int n, int extra_edges, Rng& rng);

class GraphSequence {
public:
    using Generator = std::function<GraphSnapshot(std::int64_t)>;

    GraphSequence(int n, int b_window, Generator gen)
        : n_(n), b_window_(b_window), gen_(std::move(gen)) {}

    static GraphSequence constant(GraphSnapshot g, int b_window = 1);

    int n() const { return n_; }
    int b_window() const { return b_window_; }
    GraphSnapshot at(std::int64_t t) const { return gen_(t); } // t >= 1

    // Max degree over snapshots 1..horizon.
    int max_degree(std::int64_t horizon) const;

private:
    int n_;
    int b_window_;
    Generator gen_;
};

// Deterministic-in-seed B-connected test sequence: per window, the edges of
// a random spanning tree are scattered across the B slots, plus random extra
// edges up to edge_budget per window. Individual snapshots may be edgeless;
// every window union is connected by construction.
GraphSequence random_sequence(int n, int b_window, int edge_budget, std::uint64_t seed);

// True iff the edge union over every complete window [kB+1, (k+1)B] with
// (k+1)B <= horizon is connected.
bool verify_b_connectivity(const GraphSequence& seq, int b_window, std::int64_t horizon);

// Text format: first non-comment line `n`, then `i j` per edge; `#` comments.
GraphSnapshot read_graph_file(const std::string& path);
void write_graph_file(const GraphSnapshot& g, const std::string& path);

} // namespace netlearn
