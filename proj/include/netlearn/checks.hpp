// checks.hpp — the self-verification suite: inequality grids for the decay
// machinery, an exhaustive spectral-gap check on small graphs, Monte Carlo
// one-step contraction checks, and fuzzed equivalence/identity checks.
// Shared by the `verify` CLI subcommand and the acceptance test binary.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace netlearn {
namespace checks {

struct CheckResult {
    std::string name;
    bool pass = true;
    long long checked = 0;    // hypothesis-satisfying points examined
    long long skipped = 0;    // grid points whose hypothesis is unsatisfiable
    long long violations = 0;
    std::string detail;       // first counterexample, or summary notes
};

struct CheckOptions {
    int max_n = 6;                 // spectral_bound graph size cap
    long long cases = 1000;        // fuzz cases (equivalence, identity)
    int graphs = 100;              // sieve_bound sample size
    int instances = 50;            // one_step_decrease instances
    long long draws = 100000;      // Monte Carlo draws per instance
    long long horizon = 1000000;   // recursion grid horizon
    std::uint64_t seed = 20240601; // master seed for randomized checks
};

// Product-vs-exponential envelope of the shrinking-factor product.
CheckResult check_phi_envelope();
// beta*ln(t) <= t at t = ceil(3 beta ln beta), beta in {3,10,100,10^4}.
CheckResult check_log_threshold();
// (b-a)^eps <= b^eps - (eps/b^(1-eps)) a on a randomized grid a <= b.
CheckResult check_power_inequality(const CheckOptions& opt);
// phi(q,a,b) <= 1/b^2 whenever 2 <= a <= b - (2/q) b^(1-eps) ln b.
CheckResult check_phi_smallness();
// b >= alpha(q,eps) implies b - (2/q) b^(1-eps) ln b >= b/2.
CheckResult check_half_gap();
// Unit-gap recursion stays below its closed-form envelope past alpha(q,eps).
CheckResult check_decay_unit(const CheckOptions& opt);
// General-gap recursion stays below the gap-aware envelope past the
// (larger, proof-variant) k-threshold.
CheckResult check_decay_general(const CheckOptions& opt);
// Exhaustive: every connected graph with n <= max_n, every nonempty
// measuring set: lambda_max(update matrix) <= 1 - 1/(24 H).
CheckResult check_spectral_bound(const CheckOptions& opt);
// Monte Carlo one-step contraction: both expected-decrease inequalities
// hold within 3 standard errors on random instances.
CheckResult check_one_step_decrease(const CheckOptions& opt);
// Direct update vs matrix-form update agree to 1e-12 per entry.
CheckResult check_step_equivalence(const CheckOptions& opt);
// Exact norm-decrease identity on random symmetric matrices, 1e-10 * |x|^2.
CheckResult check_norm_identity(const CheckOptions& opt);
// Sieve constant vs its support-graph lower bound, both sum conventions;
// violations of the literal eta/(nD) form are reported, the provable
// eta/(n(D+1)) form is asserted.
CheckResult check_sieve_bound(const CheckOptions& opt);

std::vector<std::string> check_names();
// Runs one named check; throws std::invalid_argument on unknown names.
CheckResult run_check(const std::string& name, const CheckOptions& opt);
std::vector<CheckResult> run_all_checks(const CheckOptions& opt);

std::string format_result(const CheckResult& r);

} // namespace checks
} // namespace netlearn
