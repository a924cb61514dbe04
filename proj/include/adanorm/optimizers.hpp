#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "adanorm/vec.hpp"

namespace adanorm {

// Quantities produced by one optimizer step, as needed by the checkers.
// b fields are NaN for optimizers that keep no scalar accumulator.
struct StepInfo {
    double sgrad_norm_sq = 0;
    double b_sq_before = std::nan("");
    double b_sq_after = std::nan("");
    double eta_t = std::nan("");
    double step_norm_sq = 0;
};

inline void require_point(const Vec& w) {
    if (w.empty()) throw std::invalid_argument("initial point must be non-empty");
    if (!all_finite(w)) throw std::invalid_argument("initial point must be finite");
}

inline void require_grad(const Vec& g, std::size_t d) {
    if (g.size() != d) throw std::invalid_argument("gradient dimension mismatch");
    if (!all_finite(g)) throw std::invalid_argument("gradient must be finite");
}

// w_{t+1} = w_t - (eta / b_t) g_t with b_t^2 = b_0^2 + sum_{s<=t} ||g_s||^2.
// The update reads nothing but (state, g): no smoothness constant, no noise
// levels, no optimal value. b_sq accumulates in long double, sequentially,
// so replaying the same gradient sequence reproduces states bit-exactly.
struct AdaGradNormState {
    Vec w;
    long double b_sq = 0.0L;
    double eta = 0;
    double b0_sq = 0;
    std::int64_t t = 0;  // completed steps
};

inline AdaGradNormState make_adagrad_norm(Vec w1, double eta, double b0) {
    require_point(w1);
    if (!(eta > 0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
    if (!(b0 > 0) || !std::isfinite(b0)) throw std::invalid_argument("b0 must be positive");
    AdaGradNormState st;
    st.w = std::move(w1);
    st.b0_sq = b0 * b0;
    st.b_sq = st.b0_sq;
    st.eta = eta;
    return st;
}

namespace detail {
// scale != 1 deliberately breaks the step-size contract; see the overstep
// fixture below.
inline StepInfo adagrad_norm_step_scaled(AdaGradNormState& st, const Vec& g, double scale) {
    require_grad(g, st.w.size());
    StepInfo info;
    info.b_sq_before = static_cast<double>(st.b_sq);
    const long double gsq = norm_sq_ld(g);
    info.sgrad_norm_sq = static_cast<double>(gsq);
    st.b_sq += gsq;
    info.b_sq_after = static_cast<double>(st.b_sq);
    info.eta_t = st.eta / std::sqrt(info.b_sq_after);
    const double coef = scale * info.eta_t;
    long double step_sq = 0.0L;
    for (std::size_t i = 0; i < st.w.size(); ++i) {
        const double dw = -coef * g[i];
        st.w[i] += dw;
        step_sq += static_cast<long double>(dw) * dw;
    }
    info.step_norm_sq = static_cast<double>(step_sq);
    st.t += 1;
    return info;
}
}  // namespace detail

inline StepInfo adagrad_norm_step(AdaGradNormState& st, const Vec& g) {
    return detail::adagrad_norm_step_scaled(st, g, 1.0);
}

// Test fixture: oversteps by 1.5x so that ||dw|| <= eta fails. Used to
// exercise the failure paths of the checkers and the sweep exit code.
inline StepInfo adagrad_norm_overstep_step(AdaGradNormState& st, const Vec& g) {
    return detail::adagrad_norm_step_scaled(st, g, 1.5);
}

// Per-coordinate accumulators: w_{t+1,i} = w_{t,i} - eta g_{t,i} / b_{t,i}
// with b_{t,i}^2 = b_0^2 + sum_{s<=t} g_{s,i}^2. StepInfo reports the summed
// accumulator so records stay one row per step.
struct CoordinateAdaGradState {
    Vec w;
    std::vector<long double> b_sq;
    double eta = 0;
    double b0_sq = 0;
    std::int64_t t = 0;
};

inline CoordinateAdaGradState make_coordinate_adagrad(Vec w1, double eta, double b0) {
    require_point(w1);
    if (!(eta > 0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
    if (!(b0 > 0) || !std::isfinite(b0)) throw std::invalid_argument("b0 must be positive");
    CoordinateAdaGradState st;
    st.b0_sq = b0 * b0;
    st.b_sq.assign(w1.size(), static_cast<long double>(st.b0_sq));
    st.w = std::move(w1);
    st.eta = eta;
    return st;
}

inline StepInfo coordinate_adagrad_step(CoordinateAdaGradState& st, const Vec& g) {
    require_grad(g, st.w.size());
    StepInfo info;
    long double before = 0.0L, after = 0.0L, gsq = 0.0L, step_sq = 0.0L;
    for (std::size_t i = 0; i < st.w.size(); ++i) before += st.b_sq[i];
    for (std::size_t i = 0; i < st.w.size(); ++i) {
        const long double gi_sq = static_cast<long double>(g[i]) * g[i];
        gsq += gi_sq;
        st.b_sq[i] += gi_sq;
        after += st.b_sq[i];
        const double dw = -st.eta * g[i] / std::sqrt(static_cast<double>(st.b_sq[i]));
        st.w[i] += dw;
        step_sq += static_cast<long double>(dw) * dw;
    }
    info.b_sq_before = static_cast<double>(before);
    info.b_sq_after = static_cast<double>(after);
    info.sgrad_norm_sq = static_cast<double>(gsq);
    info.step_norm_sq = static_cast<double>(step_sq);
    st.t += 1;
    return info;
}

// SGD with the oracle-tuned constant step min{1/((1+sigma1^2)L),
// d_tilde/(sigma0 sqrt(T))}; the second arm is +inf when sigma0 = 0. The
// tuning inputs are construction-time knowledge; the step itself again only
// sees (state, g).
struct TunedSgdState {
    Vec w;
    double step = 0;
    std::int64_t t = 0;
};

inline TunedSgdState make_tuned_sgd(Vec w1, double L, double sigma0, double sigma1,
                                    double d_tilde, std::int64_t T) {
    require_point(w1);
    if (!(L > 0)) throw std::invalid_argument("L must be positive");
    if (sigma0 < 0 || sigma1 < 0) throw std::invalid_argument("noise levels must be >= 0");
    if (!(d_tilde > 0)) throw std::invalid_argument("d_tilde must be positive");
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    TunedSgdState st;
    st.w = std::move(w1);
    const double arm1 = 1.0 / ((1.0 + sigma1 * sigma1) * L);
    if (sigma0 == 0) {
        st.step = arm1;
    } else {
        st.step = std::min(arm1, d_tilde / (sigma0 * std::sqrt(static_cast<double>(T))));
    }
    return st;
}

inline StepInfo tuned_sgd_step(TunedSgdState& st, const Vec& g) {
    require_grad(g, st.w.size());
    StepInfo info;
    info.sgrad_norm_sq = norm_sq(g);
    info.eta_t = st.step;
    long double step_sq = 0.0L;
    for (std::size_t i = 0; i < st.w.size(); ++i) {
        const double dw = -st.step * g[i];
        st.w[i] += dw;
        step_sq += static_cast<long double>(dw) * dw;
    }
    info.step_norm_sq = static_cast<double>(step_sq);
    st.t += 1;
    return info;
}

// Plain gradient descent with a user-chosen constant step.
struct GdState {
    Vec w;
    double step = 0;
    std::int64_t t = 0;
};

inline GdState make_gd(Vec w1, double step) {
    require_point(w1);
    if (!(step > 0) || !std::isfinite(step)) throw std::invalid_argument("step must be positive");
    return GdState{std::move(w1), step, 0};
}

inline StepInfo gd_step(GdState& st, const Vec& g) {
    require_grad(g, st.w.size());
    StepInfo info;
    info.sgrad_norm_sq = norm_sq(g);
    info.eta_t = st.step;
    long double step_sq = 0.0L;
    for (std::size_t i = 0; i < st.w.size(); ++i) {
        const double dw = -st.step * g[i];
        st.w[i] += dw;
        step_sq += static_cast<long double>(dw) * dw;
    }
    info.step_norm_sq = static_cast<double>(step_sq);
    st.t += 1;
    return info;
}

}  // namespace adanorm
