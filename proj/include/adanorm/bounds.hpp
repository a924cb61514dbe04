#pragma once

#include <cmath>
#include <stdexcept>

namespace adanorm {

// Problem-level quantities the convergence guarantees are stated in. These
// are checker inputs only; the optimizer itself never sees them.
struct ProblemParams {
    double eta = 0;         // step-size numerator
    double b0 = 0;          // accumulator floor
    double L = 0;           // smoothness constant
    double sigma0 = 0;      // additive noise level
    double sigma1 = 0;      // multiplicative noise level
    double grad1_norm = 0;  // ||grad F(w_1)||
    double f1 = 0;          // F(w_1)
    double f_star = 0;      // inf F
};

inline void validate(const ProblemParams& p) {
    if (!(p.eta > 0) || !(p.b0 > 0) || !(p.L > 0))
        throw std::invalid_argument("eta, b0, L must be positive");
    if (p.sigma0 < 0 || p.sigma1 < 0)
        throw std::invalid_argument("noise levels must be >= 0");
    if (p.grad1_norm < 0) throw std::invalid_argument("grad1_norm must be >= 0");
    if (p.f1 < p.f_star) throw std::invalid_argument("f1 must be >= f_star");
}

// Number of compensating times reserved per bad time.
inline int n_comp(double sigma1) {
    if (sigma1 < 0) throw std::invalid_argument("sigma1 must be >= 0");
    const double k = std::ceil(4.0 * sigma1 - 1.0);
    return k > 0 ? 8 * static_cast<int>(k) : 0;
}

// Growth envelope f(s) used inside every logarithmic factor.
inline double f_poly(double s, double b0_sq, double sigma0, double sigma1, double grad1_norm,
                     double eta, double L) {
    if (!(b0_sq > 0)) throw std::invalid_argument("b0_sq must be positive");
    if (s < 0) throw std::invalid_argument("s must be >= 0");
    const double reach = grad1_norm + eta * L * s;
    return std::exp(1.0) + sigma0 * sigma0 * s / b0_sq +
           (1.0 + sigma1 * sigma1) * s * reach * reach / b0_sq;
}

inline double f_poly(double s, const ProblemParams& p) {
    return f_poly(s, p.b0 * p.b0, p.sigma0, p.sigma1, p.grad1_norm, p.eta, p.L);
}

struct TheoremConstants {
    int n_comp = 0;
    double c0 = 0;        // 2 eta sigma0 + L eta^2 / 2
    double c0_tilde = 0;  // c0 plus the large-sigma1 start-up term
    double c1_tilde = 0;  // compensation cost
    double c1 = 0;        // c0_tilde + c1_tilde
    double c2 = 0;        // envelope constant for the cumulative gradient bound
};

inline TheoremConstants theorem_constants(const ProblemParams& p) {
    validate(p);
    TheoremConstants c;
    c.n_comp = n_comp(p.sigma1);
    const double s1sq = p.sigma1 * p.sigma1;
    c.c0 = 2.0 * p.eta * p.sigma0 + p.L * p.eta * p.eta / 2.0;
    c.c0_tilde = c.c0 + (p.sigma1 > 0.125 ? 128.0 * p.eta * s1sq * p.grad1_norm : 0.0);
    c.c1_tilde = p.L * p.eta * p.eta * c.n_comp * (c.n_comp / 8.0 + 2.0) *
                 (64.0 * s1sq + 8192.0 * s1sq * s1sq + 2.0);
    c.c1 = c.c0_tilde + c.c1_tilde;
    const double gap1 = (p.f1 - p.f_star + c.c1) / p.eta;
    const double probe = p.grad1_norm * p.grad1_norm + p.eta * p.eta * p.L * p.L;
    c.c2 = std::max(p.b0 * p.b0 + p.sigma0 * p.sigma0 +
                        32.0 * (1.0 + 8.0 * (1.0 + c.n_comp) * s1sq) * probe,
                    512.0 * gap1 * gap1);
    return c;
}

// High-probability bound on min_{t<=T} ||grad F(w_t)||^2 in the general
// affine-noise regime: O(polylog(T)/sqrt(T)) plus, when sigma1 > 1/8, a
// (delta T)^{-3/2} start-up tail.
inline double theorem_bound_sqrt(const ProblemParams& p, double T, double delta) {
    validate(p);
    if (!(T >= 1)) throw std::invalid_argument("T must be >= 1");
    if (!(delta > 0) || !(delta < 1)) throw std::invalid_argument("delta must be in (0,1)");
    const TheoremConstants c = theorem_constants(p);
    const double fT = f_poly(T, p);
    const double lg = std::log(T * T * fT);
    const double gap = p.f1 - p.f_star + c.c1;
    const double bracket = p.b0 + 2.0 * p.sigma0 +
                           std::sqrt(32.0 * (1.0 + 8.0 * (c.n_comp + 1) * p.sigma1 * p.sigma1)) *
                               (p.grad1_norm + p.eta * p.L) +
                           16.0 * std::sqrt(2.0) * gap / p.eta;
    double bound = std::sqrt(1.0 + p.sigma1 * p.sigma1) *
                   (16.0 * gap / (p.eta * std::sqrt(delta * delta * delta * T))) * bracket *
                   std::pow(lg, 3.25);
    if (p.sigma1 > 0.125) {
        const double burn = 128.0 * p.sigma1 * p.sigma1 * (c.n_comp + 1) * std::log(fT);
        bound += std::sqrt(2.0) * std::pow(burn, 1.5) * p.grad1_norm * p.grad1_norm /
                 std::pow(delta * T, 1.5);
    }
    return bound;
}

// Sharper bound available when sigma1 <= 1/8: an O(polylog/sqrt(T)) term
// whose coefficient vanishes with the noise, plus an O(polylog/T) term.
inline double theorem_bound_small_noise(const ProblemParams& p, double T, double delta) {
    validate(p);
    if (!(T >= 1)) throw std::invalid_argument("T must be >= 1");
    if (!(delta > 0) || !(delta < 1)) throw std::invalid_argument("delta must be in (0,1)");
    if (p.sigma1 > 0.125)
        throw std::invalid_argument("small-noise bound requires sigma1 <= 1/8");
    const TheoremConstants c = theorem_constants(p);
    const double fT = f_poly(T, p);
    const double lg = std::log(T * T * fT);
    const double gap0 = p.f1 - p.f_star + c.c0;
    const double inner = p.b0 + p.sigma0 +
                         std::sqrt(32.0 * (1.0 + 8.0 * (1.0 + c.n_comp) * p.sigma1 * p.sigma1)) *
                             (p.grad1_norm + p.eta * p.L) +
                         16.0 * std::sqrt(2.0) * gap0 / p.eta;
    const double term1 = (8.0 * std::sqrt(2.0) * gap0 / (delta * delta * p.eta * std::sqrt(T))) *
                         (p.sigma0 + p.sigma1 * inner) * std::pow(lg, 2.25);
    const double gap_log = p.f1 - p.f_star + c.c0 * std::log(fT);
    const double term2 = (8.0 * gap_log / (delta * delta * p.eta * T)) *
                         (p.b0 + 4.0 * (2.0 + p.sigma1 * p.sigma1) * gap_log / p.eta);
    return term1 + term2;
}

// In-expectation envelope for the cumulative squared gradient norm:
// E[sum_{t<=T} ||grad F(w_t)||^2] <= c2 T ln^{5/2}(T^2 f(T)).
inline double sum_grad_bound(const ProblemParams& p, double T) {
    validate(p);
    if (!(T >= 1)) throw std::invalid_argument("T must be >= 1");
    const TheoremConstants c = theorem_constants(p);
    return c.c2 * T * std::pow(std::log(T * T * f_poly(T, p)), 2.5);
}

}  // namespace adanorm
