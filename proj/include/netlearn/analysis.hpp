// analysis.hpp — graph-theoretic and spectral quantities used by the
// convergence bounds: lazy-walk hitting times, the sieve constant, largest
// eigenvalues, diameters, and the exact norm-decrease identity for symmetric
// matrices.
#pragma once

#include <utility>
#include <vector>

#include "netlearn/graph.hpp"
#include "netlearn/linalg.hpp"

namespace netlearn {

// Transition matrix of the lazy Metropolis walk: move i -> j with
// probability 1/(4 max(d_i, d_j)) along each edge, stay put otherwise.
WeightMatrix lazy_metropolis_transition(const GraphSnapshot& g);

struct HittingTimes {
    Matrix h;         // h(i, j) = expected steps from i to j; h(i, i) = 0
    double max_value; // max over ordered pairs
};

// Expected hitting times of the lazy Metropolis walk, one linear solve per
// target node. Throws on disconnected graphs (hitting times are infinite).
HittingTimes hitting_times(const GraphSnapshot& g);

// The quadratic-form sum over distinct index pairs can be read over ordered
// pairs (the literal definition; each edge counted twice for a symmetric
// matrix) or over unordered pairs. Both are implemented; ordered is the
// default.
enum class SieveSum { ordered, unordered };

struct SieveResult {
    double value;       // kappa
    int argmin_index;   // node attaining the outer minimum
    double lower_bound; // eta/(n D); 0 when the support graph is disconnected
};

// Sieve constant of a nonnegative stochastic matrix:
//   kappa(a) = min_m min_{|x|=1} x_m^2 + sum_{k != l} a_kl (x_k - x_l)^2.
// Each inner minimum is the smallest eigenvalue of E_mm + L, with L the
// matrix of the pair-difference form, so the computation is an exact
// eigensolve per m rather than numerical optimization.
SieveResult sieve_constant(const Matrix& a, SieveSum convention = SieveSum::ordered);
SieveResult sieve_constant(const WeightMatrix& a, SieveSum convention = SieveSum::ordered);

// eta/(n D) with eta the smallest positive off-diagonal entry and D the
// diameter of the support graph. Throws if that graph is disconnected.
double sieve_lower_bound(const Matrix& a);

// Laplacian-like matrix of sum_{pairs} w_kl (x_k - x_l)^2 under the given
// convention; exposed so tests can evaluate the form independently.
Matrix pair_difference_form(const Matrix& a, SieveSum convention);

// Largest eigenvalue of a symmetric matrix (throws on asymmetric input).
double lambda_max(const Matrix& a);
double lambda_max(const WeightMatrix& a);

// Both sides of the exact identity, for symmetric a:
//   |x|^2 - |a x|^2 = sum_j (1 - r_j) x_j^2 + sum_{k<l} [a^2]_kl (x_k - x_l)^2
// with r_j the row sums of a^2. Returned as (lhs, rhs).
std::pair<double, double> norm_decrease_identity(const Matrix& a, const Vec& x);

// Unweighted shortest-path diameter; throws on disconnected graphs.
int diameter(const GraphSnapshot& g);

} // namespace netlearn
