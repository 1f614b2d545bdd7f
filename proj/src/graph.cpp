#include "netlearn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace netlearn {

namespace {

void check_node(int i, int n, const char* what) {
    if (i < 0 || i >= n) {
        throw std::invalid_argument(std::string(what) + ": node " + std::to_string(i) +
                                    " out of range [0, " + std::to_string(n) + ")");
    }
}

// DSU for connectivity checks.
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
    bool all_connected() {
        const int r = find(0);
        for (int i = 1; i < static_cast<int>(parent.size()); ++i)
            if (find(i) != r) return false;
        return true;
    }
};

} // namespace

GraphSnapshot::GraphSnapshot(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 1) throw std::invalid_argument("GraphSnapshot: n must be >= 1");
    for (auto& e : edges) {
        check_node(e.first, n, "GraphSnapshot");
        check_node(e.second, n, "GraphSnapshot");
        if (e.first == e.second)
            throw std::invalid_argument("GraphSnapshot: self-loop at node " + std::to_string(e.first));
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adj_.assign(n_, {});
    for (const auto& [i, j] : edges_) {
        adj_[i].push_back(j);
        adj_[j].push_back(i);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());

    adj_w_.assign(n_, {});
    for (int i = 0; i < n_; ++i) {
        adj_w_[i].reserve(adj_[i].size());
        for (int j : adj_[i])
            adj_w_[i].push_back(1.0 / std::max(degree(i), degree(j)));
    }
}

bool GraphSnapshot::is_connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj_[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n_;
}

GraphSnapshot build_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    return GraphSnapshot(n, edges);
}

WeightMatrix metropolis_matrix(const GraphSnapshot& g) {
    const int n = g.n();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.neighbors(i);
        const auto& w = g.inv_max_degree(i);
        double row = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
            m(i, nb[k]) = w[k];
            row += w[k];
        }
        m(i, i) = 1.0 - row;
    }
    return {std::move(m), WeightKind::metropolis};
}

WeightMatrix protocol_matrix(const GraphSnapshot& g, const std::vector<int>& measuring) {
    const int n = g.n();
    std::vector<char> meas(n, 0);
    for (int i : measuring) {
        check_node(i, n, "protocol_matrix");
        meas[i] = 1;
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.neighbors(i);
        const auto& w = g.inv_max_degree(i);
        double row = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const double a = 0.25 * w[k];
            m(i, nb[k]) = a;
            row += a;
        }
        m(i, i) = (meas[i] ? 0.75 : 1.0) - row;
    }
    return {std::move(m), WeightKind::protocol};
}

GraphFamily parse_family(const std::string& name) {
    if (name == "complete") return GraphFamily::complete;
    if (name == "line") return GraphFamily::line;
    if (name == "star") return GraphFamily::star;
    if (name == "lollipop") return GraphFamily::lollipop;
    if (name == "grid2d") return GraphFamily::grid2d;
    throw std::invalid_argument("unknown graph family: " + name);
}

std::string family_name(GraphFamily f) {
    switch (f) {
        case GraphFamily::complete: return "complete";
        case GraphFamily::line: return "line";
        case GraphFamily::star: return "star";
        case GraphFamily::lollipop: return "lollipop";
        case GraphFamily::grid2d: return "grid2d";
    }
    return "?";
}

GraphSnapshot generate(GraphFamily family, int n) {
    std::vector<std::pair<int, int>> e;
    switch (family) {
        case GraphFamily::complete:
            if (n < 2) throw std::invalid_argument("complete: n must be >= 2");
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
            break;
        case GraphFamily::line:
            if (n < 2) throw std::invalid_argument("line: n must be >= 2");
            for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
            break;
        case GraphFamily::star:
            if (n < 2) throw std::invalid_argument("star: n must be >= 2");
            for (int i = 1; i < n; ++i) e.emplace_back(0, i);
            break;
        case GraphFamily::lollipop: {
            if (n < 4 || n % 2 != 0)
                throw std::invalid_argument("lollipop: n must be even and >= 4");
            const int half = n / 2;
            for (int i = 0; i < half; ++i)
                for (int j = i + 1; j < half; ++j) e.emplace_back(i, j);
            for (int i = half - 1; i + 1 < n; ++i) e.emplace_back(i, i + 1);
            break;
        }
        case GraphFamily::grid2d: {
            // Square-ish grid for a bare node count; exact shapes via generate_grid.
            int r = 1;
            while ((r + 1) * (r + 1) <= n) ++r;
            if (r * (n / r) != n) throw std::invalid_argument("grid2d: n must factor as rows*cols");
            return generate_grid(r, n / r);
        }
    }
    return GraphSnapshot(n, e);
}

GraphSnapshot generate_grid(int rows, int cols) {
    if (rows < 1 || cols < 1 || static_cast<long long>(rows) * cols < 2)
        throw std::invalid_argument("grid2d: need rows*cols >= 2");
    std::vector<std::pair<int, int>> e;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
        }
    }
    return GraphSnapshot(rows * cols, e);
}

int canonical_measuring_node(GraphFamily family, int n) {
    switch (family) {
        case GraphFamily::line:
        case GraphFamily::lollipop: return n - 1;
        default: return 0;
    }
}

GraphSnapshot random_connected_graph(int n, int extra_edges, Rng& rng) {
    if (n < 1) throw std::invalid_argument("random_connected_graph: n must be >= 1");
    std::vector<std::pair<int, int>> e;
    // Random tree: attach each node to a uniformly random earlier node.
    for (int v = 1; v < n; ++v) e.emplace_back(rng.uniform_int(v), v);
    const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
    for (int k = 0; k < extra_edges && static_cast<long long>(e.size()) < max_edges; ++k) {
        const int i = rng.uniform_int(n);
        const int j = rng.uniform_int(n);
        if (i != j) e.emplace_back(i, j); // dedup happens in the constructor
    }
    return GraphSnapshot(n, e);
}

GraphSequence GraphSequence::constant(GraphSnapshot g, int b_window) {
    const int n = g.n();
    auto snap = std::move(g);
    return GraphSequence(n, b_window, [snap](std::int64_t) { return snap; });
}

int GraphSequence::max_degree(std::int64_t horizon) const {
    int d = 0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const GraphSnapshot g = at(t);
        for (int i = 0; i < g.n(); ++i) d = std::max(d, g.degree(i));
    }
    return d;
}

GraphSequence random_sequence(int n, int b_window, int edge_budget, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_sequence: n must be >= 1");
    if (b_window < 1) throw std::invalid_argument("random_sequence: B must be >= 1");
    if (edge_budget < n - 1) throw std::invalid_argument("random_sequence: edge_budget must be >= n-1");

    auto gen = [n, b_window, edge_budget, seed](std::int64_t t) {
        if (t < 1) throw std::invalid_argument("GraphSequence: t must be >= 1");
        const std::int64_t window = (t - 1) / b_window;
        const int slot = static_cast<int>((t - 1) % b_window);
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(window)));

        std::vector<std::pair<int, int>> slot_edges;
        // Spanning tree scattered across the window's slots.
        for (int v = 1; v < n; ++v) {
            const int u = rng.uniform_int(v);
            const int s = rng.uniform_int(b_window);
            if (s == slot) slot_edges.emplace_back(u, v);
        }
        for (int k = n - 1; k < edge_budget; ++k) {
            const int i = rng.uniform_int(n);
            const int j = rng.uniform_int(n);
            const int s = rng.uniform_int(b_window);
            if (i != j && s == slot) slot_edges.emplace_back(i, j);
        }
        return GraphSnapshot(n, slot_edges);
    };
    return GraphSequence(n, b_window, gen);
}

bool verify_b_connectivity(const GraphSequence& seq, int b_window, std::int64_t horizon) {
    if (b_window < 1 || horizon < b_window) return false;
    const int n = seq.n();
    if (n == 1) return true;
    for (std::int64_t start = 1; start + b_window - 1 <= horizon; start += b_window) {
        Dsu dsu(n);
        for (std::int64_t t = start; t < start + b_window; ++t) {
            const GraphSnapshot g = seq.at(t);
            for (const auto& [i, j] : g.edges()) dsu.unite(i, j);
        }
        if (!dsu.all_connected()) return false;
    }
    return true;
}

GraphSnapshot read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::string line;
    int n = -1;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (n < 0) {
            if (ls >> n) continue;
            continue; // blank/comment line before the header
        }
        int i, j;
        if (ls >> i >> j) edges.emplace_back(i, j);
    }
    if (n < 1) throw std::runtime_error("graph file has no node count: " + path);
    return GraphSnapshot(n, edges);
}

void write_graph_file(const GraphSnapshot& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);
    out << g.n() << "\n";
    for (const auto& [i, j] : g.edges()) out << i << " " << j << "\n";
}

} // namespace netlearn
