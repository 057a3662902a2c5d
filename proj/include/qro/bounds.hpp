#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qro::bounds {

// Closed-form bounds used as oracles by the property suites. Values above 1
// are returned raw (the statements are vacuous there); clamp01 gives the
// probability-scale companion.

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }
inline bool vacuous(double v) { return v > 1.0; }

// q(q+1) / 2^(c+1)
inline double f_coll(double q, double c) { return q * (q + 1.0) / std::exp2(c + 1.0); }

// 7 q(q+1) / 2^c
inline double f_coll_q(double q, double c) { return 7.0 * q * (q + 1.0) / std::exp2(c); }

// 2q(q+1)/N + 3q^2(q+1)^2 / (N sqrt(N-q)) + 2q^3(q+1)^3 / (N(N-q)), for q < N
inline double find_coll_preim_bound(double q, double n) {
    if (q < 0 || q >= n) throw std::domain_error("find_coll_preim_bound requires 0 <= q < N");
    const double qp = q + 1.0;
    return 2.0 * q * qp / n + 3.0 * q * q * qp * qp / (n * std::sqrt(n - q)) +
           2.0 * q * q * q * qp * qp * qp / (n * (n - q));
}

// 4 sqrt(q^5 / N)
inline double weaker_coll_preim_bound(double q, double n) {
    return 4.0 * std::sqrt(std::pow(q, 5) / n);
}

// 2q(1+q)/N + 3q^2(1+q)^2/(N sqrt(N-q)) + 6q^3(1+q)^2(1+q^2)/(4N(N-q))
inline double coll_only_bound(double q, double n) {
    if (q < 0 || q >= n) throw std::domain_error("coll_only_bound requires 0 <= q < N");
    const double qp = 1.0 + q;
    return 2.0 * q * qp / n + 3.0 * q * q * qp * qp / (n * std::sqrt(n - q)) +
           6.0 * q * q * q * qp * qp * (1.0 + q * q) / (4.0 * n * (n - q));
}

// 9q/N + 15q(q+1)/(N sqrt(N-1)) + 10(q+1)(2q+1)/(N(N-1)); zero queries mean
// zero measurements, so the q = 0 value is pinned to 0.
inline double preim_only_bound(double q, double n) {
    if (n <= 1.0) throw std::domain_error("preim_only_bound requires N > 1");
    if (q == 0.0) return 0.0;
    return 9.0 * q / n + 15.0 * q * (q + 1.0) / (n * std::sqrt(n - 1.0)) +
           5.0 * 2.0 * (q + 1.0) * (2.0 * q + 1.0) / (n * (n - 1.0));
}

// q^2 / N and 3 q^3 / N
inline double db_preimage_bound(double q, double n) { return q * q / n; }
inline double db_collision_bound(double q, double n) { return 3.0 * q * q * q / n; }

// 2 r sqrt(eps)
inline double gentle_multi(double r, double eps) {
    if (eps < 0) throw std::domain_error("gentle_multi requires eps >= 0");
    return 2.0 * r * std::sqrt(eps);
}

// sqrt((d+1) p_find)
inline double o2h_bound(double d, double p_find) {
    if (p_find < 0) throw std::domain_error("o2h_bound requires p_find >= 0");
    return std::sqrt((d + 1.0) * p_find);
}

// 8 f_coll(q, c)
inline double classical_indiff_eps(double q, double c) { return 8.0 * f_coll(q, c); }

// 56 q(q+1)/2^c + sqrt(7 q (q+1)^2 / 2^c)
inline double quantum_indiff_eps(double q, double c) {
    return 56.0 * q * (q + 1.0) / std::exp2(c) + std::sqrt(7.0 * q * (q + 1.0) * (q + 1.0) / std::exp2(c));
}

// Proof-form composition of the quantum indifferentiability error:
// 8 f_coll_q(q) + sqrt((q+1) f_coll_q(q)).
inline double quantum_indiff_eps_proof_form(double q, double c) {
    return 8.0 * f_coll_q(q, c) + std::sqrt((q + 1.0) * f_coll_q(q, c));
}

} // namespace qro::bounds
