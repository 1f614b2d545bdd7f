#include "netlearn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace netlearn {
namespace bounds {

namespace {

void check_q_eps(double q, double eps, const char* what) {
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument(std::string(what) + ": q must lie in (0,1]");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument(std::string(what) + ": eps must lie in (0,1)");
}

constexpr double kOverflowLog = 690.0; // ~ln(1e300)

} // namespace

void BoundParams::validate() const {
    if (n < 1 || l < 1 || T < 1 || B < 1 || M < 1 || d_max < 1)
        throw std::invalid_argument("BoundParams: counts must be positive");
    if (M > n) throw std::invalid_argument("BoundParams: M must be <= n");
    if (d_max > n - 1 && n > 1) throw std::invalid_argument("BoundParams: d_max must be <= n-1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("BoundParams: epsilon must lie in (0,1)");
    if (sigma < 0.0 || sigma_prime < 0.0 || z1 < 0.0 || hitting_time <= 0.0)
        throw std::invalid_argument("BoundParams: noise/variance parameters out of range");
}

double phi_log(double q, std::int64_t a, std::int64_t b, double eps) {
    check_q_eps(q, eps, "phi");
    if (!(2 <= a && a <= b)) throw std::invalid_argument("phi: need 2 <= a <= b");
    double log_sum = 0.0;
    for (std::int64_t t = a; t < b; ++t) {
        const double factor = 1.0 - q * std::pow(static_cast<double>(t), -(1.0 - eps));
        if (factor <= 0.0)
            throw std::domain_error("phi: factor at t=" + std::to_string(t) + " is nonpositive");
        log_sum += std::log(factor);
    }
    return log_sum;
}

double phi(double q, std::int64_t a, std::int64_t b, double eps) {
    check_q_eps(q, eps, "phi");
    if (!(2 <= a && a <= b)) throw std::invalid_argument("phi: need 2 <= a <= b");
    if (b - a > 1000000) return std::exp(phi_log(q, a, b, eps));
    double prod = 1.0;
    for (std::int64_t t = a; t < b; ++t) {
        const double factor = 1.0 - q * std::pow(static_cast<double>(t), -(1.0 - eps));
        if (factor <= 0.0)
            throw std::domain_error("phi: factor at t=" + std::to_string(t) + " is nonpositive");
        prod *= factor;
    }
    return prod;
}

double alpha_threshold(double q, double eps) {
    check_q_eps(q, eps, "alpha_threshold");
    const double inner = 12.0 / (q * eps) * std::log(4.0 / (q * eps));
    return std::pow(inner, 1.0 / eps);
}

double decay_k_threshold(double q, double eps, int gap_bound, ThresholdVariant variant) {
    check_q_eps(q, eps, "decay_k_threshold");
    if (gap_bound < 1) throw std::invalid_argument("decay_k_threshold: gap bound must be >= 1");
    const double t = static_cast<double>(gap_bound);
    const double c1 = (variant == ThresholdVariant::statement) ? 12.0 : 18.0;
    const double c2 = (variant == ThresholdVariant::statement) ? 4.0 : 6.0;
    const double inner = c1 * t / (q * eps) * std::log(c2 * t / (q * eps));
    return std::pow(inner, 1.0 / eps);
}

std::vector<double> decay_recursion(double a1, double q, double d, double eps,
                                    const std::vector<std::int64_t>& times) {
    check_q_eps(q, eps, "decay_recursion");
    if (a1 < 0.0 || d < 0.0)
        throw std::invalid_argument("decay_recursion: a1 and d must be nonnegative");
    if (times.empty() || times.front() != 1)
        throw std::invalid_argument("decay_recursion: times must start at 1");
    std::vector<double> out;
    out.reserve(times.size());
    out.push_back(a1);
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] <= times[k - 1])
            throw std::invalid_argument("decay_recursion: times must be increasing");
        const double tk = static_cast<double>(times[k - 1]);
        const double tk1 = static_cast<double>(times[k]);
        const double factor = 1.0 - q * std::pow(tk1, -(1.0 - eps));
        if (factor < 0.0)
            throw std::domain_error("decay_recursion: negative factor at t=" + std::to_string(times[k]));
        out.push_back(factor * out.back() + d * std::pow(tk, -(2.0 - 2.0 * eps)));
    }
    return out;
}

double decay_bound(std::int64_t k, double a1, double q, double d, double eps, int gap_bound) {
    check_q_eps(q, eps, "decay_bound");
    if (k < 1) throw std::invalid_argument("decay_bound: k must be >= 1");
    const double t = static_cast<double>(gap_bound);
    const double kd = static_cast<double>(k);
    const double head = 9.0 * d * t / (q * std::pow(kd, 1.0 - eps));
    const double tail = a1 * std::exp(-q * (std::pow(kd, eps) - 1.0) / (t * eps));
    return head + tail;
}

double decay_bound_unit(std::int64_t k, double a1, double q, double d, double eps) {
    check_q_eps(q, eps, "decay_bound_unit");
    if (k < 1) throw std::invalid_argument("decay_bound_unit: k must be >= 1");
    const double kd = static_cast<double>(k);
    const double head = 9.0 * d / q * std::log(kd) / std::pow(kd, 1.0 - eps);
    const double tail = a1 * std::exp(-q * (std::pow(kd, eps) - 2.0) / eps);
    return head + tail;
}

namespace {

Transient transient_from_log(double log_value) {
    Transient t{};
    t.log_value = log_value;
    t.overflow = log_value > kOverflowLog;
    t.value = t.overflow ? std::numeric_limits<double>::infinity() : std::exp(log_value);
    return t;
}

} // namespace

Transient transient_connected(const BoundParams& p) {
    p.validate();
    const double th = static_cast<double>(p.T) * p.hitting_time;
    const double inner = 288.0 * th / p.epsilon * std::log(96.0 * th / p.epsilon);
    const double log_value = std::log(2.0 * p.T) + std::log(inner) / p.epsilon;
    return transient_from_log(log_value);
}

Transient transient_general(const BoundParams& p) {
    p.validate();
    const double tb = static_cast<double>(std::max(p.T, p.B));
    const double core = 1.0 * p.n * p.n * p.d_max * (1.0 + tb);
    const double inner = 384.0 * core / p.epsilon * std::log(128.0 * core / p.epsilon);
    const double log_value = std::log(2.0 * tb) + std::log(inner) / p.epsilon;
    return transient_from_log(log_value);
}

double connected_bound(double t, const BoundParams& p) {
    p.validate();
    const double s = t / p.T - 1.0;
    if (!(s > 0.0)) throw std::invalid_argument("connected_bound: need t/T > 1");
    const double noise = p.M * p.sigma * p.sigma +
                         static_cast<double>(p.n) * p.T * p.sigma_prime * p.sigma_prime;
    const double head = 15.0 * p.hitting_time * p.T * p.l * noise / std::pow(s, 1.0 - p.epsilon);
    const double tail =
        p.z1 * std::exp(-(std::pow(s, p.epsilon) - 2.0) / (24.0 * p.hitting_time * p.T * p.epsilon));
    return head + tail;
}

double general_bound(double t, const BoundParams& p) {
    p.validate();
    const double tb = static_cast<double>(std::max(p.T, p.B));
    const double s = t / tb;
    if (!(s > 0.0)) throw std::invalid_argument("general_bound: need t > 0");
    const double core = 1.0 * p.n * p.n * p.d_max;
    const double noise = p.M * p.sigma * p.sigma +
                         2.0 * p.n * (1.0 + tb) * p.sigma_prime * p.sigma_prime;
    const double head = 2.0 * core * tb * p.l * noise / std::pow(s, 1.0 - p.epsilon);
    const double tail =
        p.z1 * std::exp(-(std::pow(s, p.epsilon) - 2.0) / (32.0 * core * (1.0 + tb) * p.epsilon));
    return head + tail;
}

} // namespace bounds
} // namespace netlearn
