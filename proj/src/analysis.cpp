#include "netlearn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace netlearn {

WeightMatrix lazy_metropolis_transition(const GraphSnapshot& g) {
    const int n = g.n();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.neighbors(i);
        double row = 0.0;
        for (int j : nb) {
            const double p = 1.0 / (4.0 * std::max(g.degree(i), g.degree(j)));
            m(i, j) = p;
            row += p;
        }
        m(i, i) = 1.0 - row;
    }
    return {std::move(m), WeightKind::lazy_walk};
}

HittingTimes hitting_times(const GraphSnapshot& g) {
    if (!g.is_connected()) throw std::invalid_argument("hitting_times: graph is disconnected");
    const int n = g.n();
    const Matrix p = lazy_metropolis_transition(g).m;

    HittingTimes result{Matrix(n, n), 0.0};
    if (n == 1) return result;

    for (int target = 0; target < n; ++target) {
        // (I - P restricted to non-target states) h = 1.
        Matrix a(n - 1, n - 1);
        Vec b(static_cast<std::size_t>(n - 1), 1.0);
        auto idx = [target](int i) { return i < target ? i : i - 1; };
        for (int i = 0; i < n; ++i) {
            if (i == target) continue;
            for (int j = 0; j < n; ++j) {
                if (j == target) continue;
                a(idx(i), idx(j)) = (i == j ? 1.0 : 0.0) - p(i, j);
            }
        }
        const Vec h = lu_solve(std::move(a), std::move(b));
        for (int i = 0; i < n; ++i) {
            if (i == target) continue;
            result.h(i, target) = h[idx(i)];
            result.max_value = std::max(result.max_value, h[idx(i)]);
        }
    }
    return result;
}

Matrix pair_difference_form(const Matrix& a, SieveSum convention) {
    if (a.rows != a.cols) throw std::invalid_argument("pair_difference_form: not square");
    const int n = a.rows;
    Matrix l(n, n);
    for (int k = 0; k < n; ++k) {
        for (int m = k + 1; m < n; ++m) {
            const double w = (convention == SieveSum::ordered) ? a(k, m) + a(m, k) : a(k, m);
            if (w == 0.0) continue;
            l(k, k) += w;
            l(m, m) += w;
            l(k, m) -= w;
            l(m, k) -= w;
        }
    }
    return l;
}

SieveResult sieve_constant(const Matrix& a, SieveSum convention) {
    if (a.rows != a.cols) throw std::invalid_argument("sieve_constant: not square");
    const int n = a.rows;
    const Matrix l = pair_difference_form(a, convention);

    double best = std::numeric_limits<double>::infinity();
    int best_m = 0;
    for (int m = 0; m < n; ++m) {
        Matrix q = l;
        q(m, m) += 1.0;
        const double v = min_eigenvalue(q);
        if (v < best) {
            best = v;
            best_m = m;
        }
    }
    if (best < 0.0 && best > -1e-12) best = 0.0; // eigensolver noise on exact zeros

    SieveResult r{best, best_m, 0.0};
    // Support-graph lower bound, when it exists.
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a(i, j) > 0.0 || a(j, i) > 0.0) edges.emplace_back(i, j);
    const GraphSnapshot g(n, edges);
    if (n >= 2 && g.is_connected()) r.lower_bound = sieve_lower_bound(a);
    return r;
}

SieveResult sieve_constant(const WeightMatrix& a, SieveSum convention) {
    return sieve_constant(a.m, convention);
}

double sieve_lower_bound(const Matrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("sieve_lower_bound: not square");
    const int n = a.rows;
    double eta = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (a(i, j) > 0.0) {
                eta = std::min(eta, a(i, j));
                if (i < j) edges.emplace_back(i, j);
            }
        }
    }
    const GraphSnapshot g(n, edges);
    if (!g.is_connected()) throw std::invalid_argument("sieve_lower_bound: support graph is disconnected");
    const int d = diameter(g);
    return eta / (static_cast<double>(n) * d);
}

double lambda_max(const Matrix& a) {
    if (!is_symmetric(a, 1e-9)) throw std::invalid_argument("lambda_max: matrix is not symmetric");
    return max_eigenvalue(a);
}

double lambda_max(const WeightMatrix& a) { return lambda_max(a.m); }

std::pair<double, double> norm_decrease_identity(const Matrix& a, const Vec& x) {
    if (a.rows != a.cols || static_cast<int>(x.size()) != a.rows)
        throw std::invalid_argument("norm_decrease_identity: dimension mismatch");
    if (!is_symmetric(a, 1e-9)) throw std::invalid_argument("norm_decrease_identity: not symmetric");

    const Vec ax = matvec(a, x);
    const double lhs = norm2_sq(x) - norm2_sq(ax);

    const Matrix a2 = matmul(a, a);
    const int n = a.rows;
    double rhs = 0.0;
    for (int j = 0; j < n; ++j) {
        double row = 0.0;
        for (int k = 0; k < n; ++k) row += a2(j, k);
        rhs += (1.0 - row) * x[j] * x[j];
    }
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) rhs += a2(k, l) * (x[k] - x[l]) * (x[k] - x[l]);
    return {lhs, rhs};
}

int diameter(const GraphSnapshot& g) {
    if (!g.is_connected()) throw std::invalid_argument("diameter: graph is disconnected");
    const int n = g.n();
    int diam = 0;
    std::vector<int> dist(n);
    for (int src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> q;
        q.push(src);
        dist[src] = 0;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            diam = std::max(diam, dist[u]);
            for (int v : g.neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
            }
        }
    }
    return diam;
}

} // namespace netlearn
