// bounds.hpp — closed-form convergence-bound evaluators and the
// decreasing-stepsize decay-recursion machinery they rest on.
//
// The central recursion is
//   a(t_{k+1}) <= (1 - q/t_{k+1}^(1-eps)) a(t_k) + d/t_k^(2-2eps)
// over an increasing integer sequence t_k with t_1 = 1; its closed-form
// decay envelope and the two expected-variance bounds (per-step connected
// case, B-connected general case) are evaluated here. Everything is a pure
// function; large products and thresholds are computed through logs so that
// small eps does not overflow.
#pragma once

#include <cstdint>
#include <vector>

namespace netlearn {
namespace bounds {

struct BoundParams {
    int n = 1;                // number of agents
    int l = 1;                // target dimension
    int T = 1;                // measurement gap bound
    int B = 1;                // connectivity window
    int M = 1;                // max simultaneous measurers
    int d_max = 1;            // max degree over the sequence
    double sigma = 0.0;       // measurement noise std dev
    double sigma_prime = 0.0; // offset noise std dev
    double epsilon = 0.5;     // stepsize exponent parameter, in (0,1)
    double hitting_time = 1.0; // H, max lazy-walk hitting time (connected case)
    double z1 = 0.0;          // initial variance Z(1)

    void validate() const;
};

// phi(q, a, b) = prod_{t=a}^{b-1} (1 - q/t^(1-eps)); 1 when a == b.
// Throws if a factor is nonpositive rather than clamping. Ranges longer
// than 10^6 are evaluated via summed logs.
double phi(double q, std::int64_t a, std::int64_t b, double eps);
double phi_log(double q, std::int64_t a, std::int64_t b, double eps); // ln phi

// alpha(q, eps) = [12/(q eps) * ln(4/(q eps))]^(1/eps)
double alpha_threshold(double q, double eps);

// k-threshold past which the general-gap decay envelope is guaranteed.
// The statement variant uses constants 12/4, the proof variant 18/6; the
// verification suite uses the larger.
enum class ThresholdVariant { statement, proof };
double decay_k_threshold(double q, double eps, int gap_bound, ThresholdVariant variant);

// Iterates the recursion (with equality) along the supplied times.
// times must be increasing integers with times[0] == 1. Returns a(t_k) for
// every supplied time, starting with a1.
std::vector<double> decay_recursion(double a1, double q, double d, double eps,
                                    const std::vector<std::int64_t>& times);

// Closed-form envelope at index k (valid past decay_k_threshold):
//   9 d T / (q k^(1-eps)) + a1 * exp(-q (k^eps - 1)/(T eps))
double decay_bound(std::int64_t k, double a1, double q, double d, double eps, int gap_bound);

// Unit-gap (t_k = k) envelope, valid for k >= alpha_threshold(q, eps):
//   (9 d / q) ln(k)/k^(1-eps) + a1 * exp(-q (k^eps - 2)/eps)
double decay_bound_unit(std::int64_t k, double a1, double q, double d, double eps);

// Transient thresholds. Values beyond ~1e300 are reported as overflow with
// their natural log still available.
struct Transient {
    double value;     // +inf if overflow
    double log_value; // ln of the threshold
    bool overflow;
};

// 2T [288 T H / eps * ln(96 T H / eps)]^(1/eps)
Transient transient_connected(const BoundParams& p);

// 2 max(T,B) [384 n^2 d_max (1+max(T,B))/eps * ln(128 n^2 d_max (1+max(T,B))/eps)]^(1/eps)
Transient transient_general(const BoundParams& p);

// Expected-variance bound when every snapshot is connected, valid past
// transient_connected:
//   15 H T l (M sigma^2 + n T sigma'^2) / (t/T - 1)^(1-eps)
//     + Z1 exp(-((t/T - 1)^eps - 2)/(24 H T eps))
double connected_bound(double t, const BoundParams& p);

// Expected-variance bound for B-connected sequences, valid past
// transient_general; uses s = t/max(T,B):
//   2 n^2 d_max max(T,B) l (M sigma^2 + 2n(1+max(T,B)) sigma'^2) / s^(1-eps)
//     + Z1 exp(-(s^eps - 2)/(32 n^2 d_max (1+max(T,B)) eps))
double general_bound(double t, const BoundParams& p);

} // namespace bounds
} // namespace netlearn
