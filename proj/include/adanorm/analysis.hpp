#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adanorm/bounds.hpp"
#include "adanorm/csv.hpp"
#include "adanorm/problems.hpp"
#include "adanorm/rng.hpp"
#include "adanorm/trajectory.hpp"

namespace adanorm {

// Deterministic inequalities are asserted with a small relative allowance so
// that floating-point reassociation cannot flip a true statement.
inline constexpr double kRelTol = 1e-9;

inline bool leq_with_tol(double lhs, double rhs) {
    const double slack = kRelTol * std::max(std::fabs(lhs), std::fabs(rhs));
    return lhs <= rhs + slack;
}

struct CheckRecord {
    std::string check;   // stable identifier of the inequality
    std::string detail;  // location / context, e.g. worst step
    double lhs = 0;
    double rhs = 0;
    double margin = 0;  // rhs - lhs at the reported location
    std::string status;  // pass | fail | skip | vacuous | info
};

struct CheckReport {
    std::vector<CheckRecord> records;

    bool all_pass() const {
        for (const auto& r : records)
            if (r.status == "fail") return false;
        return true;
    }

    void add(std::string check, std::string detail, double lhs, double rhs,
             std::string status) {
        records.push_back(
            {std::move(check), std::move(detail), lhs, rhs, rhs - lhs, std::move(status)});
    }

    void merge(const CheckReport& other) {
        records.insert(records.end(), other.records.begin(), other.records.end());
    }
};

inline constexpr const char* kReportHeader = "check,detail,lhs,rhs,margin,status";

inline void write_report_csv(std::ostream& os, const CheckReport& report) {
    os << kReportHeader << '\n';
    for (const auto& r : report.records)
        os << r.check << ',' << r.detail << ',' << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ','
           << fmt17(r.margin) << ',' << r.status << '\n';
}

// Deterministic step-size proxy eta~_t = eta / sqrt(b_{t-1}^2 +
// (1+sigma1^2)||grad F_t||^2 + sigma0^2). It lower-bounds the realized
// step eta/b_t in conditional expectation and never exceeds eta/b_{t-1}.
inline double proxy_step_size(double eta, double b_sq_before, double grad_norm_sq,
                              double sigma0, double sigma1) {
    if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
    if (!(b_sq_before > 0)) throw std::invalid_argument("b_sq_before must be positive");
    if (grad_norm_sq < 0) throw std::invalid_argument("grad_norm_sq must be >= 0");
    return eta / std::sqrt(b_sq_before + (1.0 + sigma1 * sigma1) * grad_norm_sq +
                           sigma0 * sigma0);
}

// Plug-in estimate of bias_t = 4 sqrt(E_t[||g||^2 / (b_{t-1}^2 + ||g||^2)])
// from M fresh draws at the current iterate. The outer 4 sqrt(.) makes the
// plug-in estimator upward-biased by Jensen; the standard error reported is
// that of the inner mean, which is the quantity the thresholds act on.
struct BiasEstimate {
    double bias_est = 0;
    double mean_ratio = 0;
    double se_mean_ratio = 0;
    int M = 0;
};

inline BiasEstimate estimate_bias(const Vec& grad_true, const NoiseModel& nm,
                                  double b_sq_before, int M, RngStream& rng) {
    if (M < 2) throw std::invalid_argument("estimate_bias: M must be >= 2");
    if (!(b_sq_before > 0)) throw std::invalid_argument("b_sq_before must be positive");
    Vec g;
    long double mean = 0.0L, m2 = 0.0L;
    for (int i = 1; i <= M; ++i) {
        apply_noise(grad_true, nm, rng, g);
        const double gsq = norm_sq(g);
        const long double r = gsq / (b_sq_before + gsq);
        const long double delta = r - mean;
        mean += delta / i;
        m2 += delta * (r - mean);
    }
    BiasEstimate out;
    out.M = M;
    out.mean_ratio = static_cast<double>(mean);
    const double var = M > 1 ? static_cast<double>(m2) / (M - 1) : 0.0;
    out.se_mean_ratio = std::sqrt(std::max(var, 0.0) / M);
    out.bias_est = 4.0 * std::sqrt(std::max(out.mean_ratio, 0.0));
    return out;
}

// Two equivalent thresholds for calling a time good:
//   bias_threshold:  1 - sigma1 * bias_t >= 1/2
//   ratio_threshold: E_t[||g||^2/(b^2+||g||^2)] <= 1/(64 sigma1^2)
// They coincide algebraically; both act on the same resampled inner mean.
enum class ClassifyRule { bias_threshold, ratio_threshold };

struct GoodBadClassification {
    std::vector<std::int64_t> good;
    std::vector<std::int64_t> bad;
    std::vector<std::int64_t> unknown;  // uninstrumented steps
    ClassifyRule rule = ClassifyRule::bias_threshold;
    double sigma1 = 0;
    std::int64_t T = 0;
    double coverage = 0;  // classified fraction of [T]
};

inline GoodBadClassification classify_times(const std::vector<StepRecord>& records,
                                            double sigma1, ClassifyRule rule) {
    if (sigma1 < 0) throw std::invalid_argument("sigma1 must be >= 0");
    GoodBadClassification cls;
    cls.rule = rule;
    cls.sigma1 = sigma1;
    cls.T = static_cast<std::int64_t>(records.size());
    for (const auto& r : records) {
        if (sigma1 == 0.0) {
            cls.good.push_back(r.t);  // additive noise never shrinks the drift term
            continue;
        }
        if (!r.bias_est) {
            cls.unknown.push_back(r.t);
            continue;
        }
        bool good;
        if (rule == ClassifyRule::bias_threshold) {
            good = 1.0 - sigma1 * (*r.bias_est) >= 0.5;
        } else {
            const double mean_ratio = (*r.bias_est / 4.0) * (*r.bias_est / 4.0);
            good = mean_ratio <= 1.0 / (64.0 * sigma1 * sigma1);
        }
        (good ? cls.good : cls.bad).push_back(r.t);
    }
    cls.coverage = cls.T == 0 ? 1.0
                              : static_cast<double>(cls.good.size() + cls.bad.size()) /
                                    static_cast<double>(cls.T);
    return cls;
}

// Greedy construction of the compensation sets. Bad times are processed in
// decreasing order; the i-th bad time may only use good times strictly below
// both itself and the minimum of the previously assigned set (+inf before
// any assignment, -inf once an eligibility pool comes up empty), and it
// takes the largest n_comp of those.
struct CompensationAssignment {
    int n_comp = 0;
    // (bad time, assigned good times ascending), bad times descending
    std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> sets;
    std::vector<std::int64_t> barriers;  // min of assigned set after each bad time
};

inline CompensationAssignment build_compensation_sets(const GoodBadClassification& cls) {
    if (!cls.unknown.empty())
        throw std::invalid_argument(
            "compensation sets need a fully classified trajectory (no unknown steps)");
    CompensationAssignment asg;
    asg.n_comp = n_comp(cls.sigma1);
    std::vector<std::int64_t> good = cls.good;
    std::sort(good.begin(), good.end());
    std::vector<std::int64_t> bad = cls.bad;
    std::sort(bad.begin(), bad.end(), std::greater<>());
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();
    std::int64_t barrier = kInf;
    for (std::int64_t tb : bad) {
        std::vector<std::int64_t> assigned;
        if (asg.n_comp > 0 && barrier != kNegInf) {
            const std::int64_t upper = std::min(tb, barrier);
            const auto pos = std::lower_bound(good.begin(), good.end(), upper) - good.begin();
            const std::int64_t k = std::min<std::int64_t>(asg.n_comp, pos);
            assigned.assign(good.begin() + (pos - k), good.begin() + pos);
            if (!assigned.empty()) {
                barrier = assigned.front();
            } else {
                barrier = kNegInf;
            }
        }
        asg.barriers.push_back(barrier);
        asg.sets.emplace_back(tb, std::move(assigned));
    }
    return asg;
}

// Structural dichotomy of the greedy assignment: every bad time t either has
// a full set with t - min(S_comp(t)) <= n_comp |S_bad|, or a partial set
// with t itself <= n_comp |S_bad|.
inline CheckReport check_compensation_dichotomy(const CompensationAssignment& asg) {
    CheckReport rep;
    const double budget =
        static_cast<double>(asg.n_comp) * static_cast<double>(asg.sets.size());
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string worst_detail = "no bad times";
    double worst_lhs = 0, worst_rhs = 0;
    bool ok = true;
    for (const auto& [tb, comp] : asg.sets) {
        double lhs, rhs;
        if (asg.n_comp == 0 || static_cast<int>(comp.size()) == asg.n_comp) {
            lhs = comp.empty() ? 0.0 : static_cast<double>(tb - comp.front());
            rhs = budget;
        } else {
            lhs = static_cast<double>(tb);
            rhs = budget;
        }
        if (rhs - lhs < worst_margin) {
            worst_margin = rhs - lhs;
            worst_detail = "bad t=" + std::to_string(tb);
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
        ok = ok && leq_with_tol(lhs, rhs);
    }
    rep.add("compensation_dichotomy", worst_detail, worst_lhs, worst_rhs,
            ok ? "pass" : "fail");
    return rep;
}

// Per-step deterministic offset inequality at each fully compensated bad
// time t:
//   ((4 sigma1 - 1)/2) eta~_t ||grad F_t||^2
//     - sum_{t' in S_comp(t)} (eta~_{t'}/4) ||grad F_{t'}||^2
//   <= (eta^2 L n_comp / 8) (t - min S_comp(t)).
// Partially compensated bad times are skipped with a reason.
inline CheckReport verify_compensation_inequality(const std::vector<StepRecord>& records,
                                                  const CompensationAssignment& asg,
                                                  double eta, double L, double sigma0,
                                                  double sigma1) {
    CheckReport rep;
    auto eta_tilde_of = [&](std::int64_t t) {
        const auto& r = records.at(static_cast<std::size_t>(t - 1));
        if (r.t != t) throw std::invalid_argument("records must be contiguous from t=1");
        if (r.eta_tilde_t) return *r.eta_tilde_t;
        if (!r.b_sq_before) throw std::invalid_argument("record lacks accumulator state");
        return proxy_step_size(eta, *r.b_sq_before, r.grad_norm_sq, sigma0, sigma1);
    };
    auto grad_sq_of = [&](std::int64_t t) {
        return records.at(static_cast<std::size_t>(t - 1)).grad_norm_sq;
    };
    int checked = 0, skipped = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_lhs = 0, worst_rhs = 0;
    std::string worst_detail = "no full sets";
    bool ok = true;
    for (const auto& [tb, comp] : asg.sets) {
        if (static_cast<int>(comp.size()) < asg.n_comp) {
            ++skipped;
            rep.add("compensation_offset", "bad t=" + std::to_string(tb), 0, 0,
                    "skip");
            rep.records.back().detail += " insufficient compensators";
            continue;
        }
        double lhs = (4.0 * sigma1 - 1.0) / 2.0 * eta_tilde_of(tb) * grad_sq_of(tb);
        for (std::int64_t tc : comp) lhs -= eta_tilde_of(tc) / 4.0 * grad_sq_of(tc);
        const double rhs =
            comp.empty() ? 0.0
                         : eta * eta * L * asg.n_comp / 8.0 *
                               static_cast<double>(tb - comp.front());
        ++checked;
        if (rhs - lhs < worst_margin) {
            worst_margin = rhs - lhs;
            worst_detail = "worst bad t=" + std::to_string(tb);
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
        ok = ok && leq_with_tol(lhs, rhs);
    }
    worst_detail += " (checked " + std::to_string(checked) + ";skipped " +
                    std::to_string(skipped) + ")";
    rep.add("compensation_offset", worst_detail, worst_lhs, worst_rhs,
            checked == 0 ? "skip" : (ok ? "pass" : "fail"));
    return rep;
}

// Per-step bound ||dw_t|| <= eta and the cumulative decay bound
// sum_{t<=s} ||dw_t||^2 <= eta^2 ln(b_s^2 / b_0^2) at every prefix.
inline CheckReport check_step_decay(const std::vector<StepRecord>& records, double eta,
                                    double b0_sq) {
    CheckReport rep;
    if (records.empty()) {
        rep.add("step_bound", "empty trajectory", 0, eta * eta, "pass");
        rep.add("step_decay_sum", "empty trajectory", 0, 0, "pass");
        return rep;
    }
    const double eta_sq = eta * eta;
    bool ok_step = true, ok_sum = true;
    double worst_step_margin = std::numeric_limits<double>::infinity();
    double worst_sum_margin = std::numeric_limits<double>::infinity();
    CheckRecord step_rec{"step_bound", "", 0, 0, 0, ""}, sum_rec{"step_decay_sum", "", 0, 0, 0, ""};
    long double cumulative = 0.0L;
    for (const auto& r : records) {
        if (!r.b_sq_after) throw std::invalid_argument("step decay needs accumulator records");
        ok_step = ok_step && leq_with_tol(r.step_norm_sq, eta_sq);
        if (eta_sq - r.step_norm_sq < worst_step_margin) {
            worst_step_margin = eta_sq - r.step_norm_sq;
            step_rec.detail = "worst t=" + std::to_string(r.t);
            step_rec.lhs = r.step_norm_sq;
            step_rec.rhs = eta_sq;
        }
        cumulative += r.step_norm_sq;
        const double lhs = static_cast<double>(cumulative);
        const double rhs = eta_sq * std::log(*r.b_sq_after / b0_sq);
        ok_sum = ok_sum && leq_with_tol(lhs, rhs);
        if (rhs - lhs < worst_sum_margin) {
            worst_sum_margin = rhs - lhs;
            sum_rec.detail = "worst prefix t=" + std::to_string(r.t);
            sum_rec.lhs = lhs;
            sum_rec.rhs = rhs;
        }
    }
    step_rec.margin = step_rec.rhs - step_rec.lhs;
    step_rec.status = ok_step ? "pass" : "fail";
    sum_rec.margin = sum_rec.rhs - sum_rec.lhs;
    sum_rec.status = ok_sum ? "pass" : "fail";
    rep.records.push_back(step_rec);
    rep.records.push_back(sum_rec);
    return rep;
}

// Gradient drift along the trajectory: pairwise
// | ||grad F_{t2}|| - ||grad F_{t1}|| | <= eta L (t2 - t1) on a deterministic
// probe set, and the per-step envelope
// ||grad F_t||^2 <= 2 ||grad F_1||^2 + 2 eta^2 L^2 t ln(b_t^2/b_0^2).
inline CheckReport check_gradient_drift(const std::vector<StepRecord>& records, double eta,
                                        double L, double b0_sq) {
    CheckReport rep;
    if (records.empty()) {
        rep.add("grad_drift_pairwise", "empty trajectory", 0, 0, "pass");
        rep.add("grad_drift_envelope", "empty trajectory", 0, 0, "pass");
        return rep;
    }
    const std::int64_t T = records.back().t;
    auto grad_norm_of = [&](std::int64_t t) {
        return std::sqrt(records.at(static_cast<std::size_t>(t - 1)).grad_norm_sq);
    };
    bool ok_pair = true;
    CheckRecord pair_rec{"grad_drift_pairwise", "", 0, 0, 0, ""};
    double worst_pair = std::numeric_limits<double>::infinity();
    auto probe = [&](std::int64_t t1, std::int64_t t2) {
        if (t1 >= t2) return;
        const double lhs = std::fabs(grad_norm_of(t2) - grad_norm_of(t1));
        const double rhs = eta * L * static_cast<double>(t2 - t1);
        ok_pair = ok_pair && leq_with_tol(lhs, rhs);
        if (rhs - lhs < worst_pair) {
            worst_pair = rhs - lhs;
            pair_rec.detail =
                "worst pair (" + std::to_string(t1) + ";" + std::to_string(t2) + ")";
            pair_rec.lhs = lhs;
            pair_rec.rhs = rhs;
        }
    };
    const std::int64_t stride = std::max<std::int64_t>(1, T / 64);
    for (std::int64_t t = 1; t + 1 <= T; t += stride) probe(t, t + 1);
    for (std::int64_t t = 1 + stride; t <= T; t += stride) {
        probe(1, t);
        probe(t, T);
    }
    pair_rec.margin = pair_rec.rhs - pair_rec.lhs;
    pair_rec.status = ok_pair ? "pass" : "fail";
    rep.records.push_back(pair_rec);

    const double grad1_sq = records.front().grad_norm_sq;
    bool ok_env = true;
    CheckRecord env_rec{"grad_drift_envelope", "", 0, 0, 0, ""};
    double worst_env = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        if (!r.b_sq_after) throw std::invalid_argument("drift envelope needs accumulator records");
        const double lhs = r.grad_norm_sq;
        const double rhs = 2.0 * grad1_sq + 2.0 * eta * eta * L * L *
                                               static_cast<double>(r.t) *
                                               std::log(*r.b_sq_after / b0_sq);
        ok_env = ok_env && leq_with_tol(lhs, rhs);
        if (rhs - lhs < worst_env) {
            worst_env = rhs - lhs;
            env_rec.detail = "worst t=" + std::to_string(r.t);
            env_rec.lhs = lhs;
            env_rec.rhs = rhs;
        }
    }
    env_rec.margin = env_rec.rhs - env_rec.lhs;
    env_rec.status = ok_env ? "pass" : "fail";
    rep.records.push_back(env_rec);
    return rep;
}

// sum_{t=0}^{T} a_t / (sum_{s<=t} a_s) <= 1 + ln(sum_t a_t) - ln(a_0)
// for a_0 > 0, a_t >= 0.
inline CheckReport check_log_sum_inequality(const std::vector<double>& a) {
    if (a.empty()) throw std::invalid_argument("sequence must be non-empty");
    if (!(a.front() > 0)) throw std::invalid_argument("a_0 must be positive");
    CheckReport rep;
    long double prefix = 0.0L, lhs = 0.0L;
    for (double x : a) {
        if (x < 0) throw std::invalid_argument("sequence terms must be >= 0");
        prefix += x;
        lhs += x / prefix;
    }
    const double rhs =
        1.0 + std::log(static_cast<double>(prefix)) - std::log(a.front());
    rep.add("log_sum", "T=" + std::to_string(a.size() - 1), static_cast<double>(lhs), rhs,
            leq_with_tol(static_cast<double>(lhs), rhs) ? "pass" : "fail");
    return rep;
}

// One-step expected-descent inequality, estimated by Monte Carlo at a fixed
// state (w, b_sq_before):
//   (eta~/2)(1 - sigma1 bias) ||grad F||^2
//     <= E[F(w) - F(w_next)] + c0 E[||g||^2/(b^2+||g||^2)],
// with c0 = 2 eta sigma0 + L eta^2 / 2. A negative drift coefficient makes
// the statement vacuous and is flagged as such.
struct DescentCheck {
    double lhs = 0;
    double rhs = 0;
    double se_combined = 0;
    double bias_est = 0;
    double mean_ratio = 0;
    double mean_drop = 0;
    double drift_coeff = 0;
    int M = 0;
    bool vacuous = false;
    bool low_power = false;
    bool pass = false;
};

inline DescentCheck verify_descent_lemma(const Objective& obj, const NoiseModel& nm,
                                         const Vec& w, double b_sq_before, double eta, int M,
                                         RngStream& rng, double se_mult = 4.0) {
    if (M < 2) throw std::invalid_argument("verify_descent_lemma: M must be >= 2");
    if (!(b_sq_before > 0)) throw std::invalid_argument("b_sq_before must be positive");
    const Vec grad_true = obj.grad_at(w);
    const double G2 = norm_sq(grad_true);
    const double f_w = obj.eval(w);
    const double L = obj.smoothness();
    const double c0 = 2.0 * eta * nm.sigma0 + L * eta * eta / 2.0;
    const double eta_tilde = proxy_step_size(eta, b_sq_before, G2, nm.sigma0, nm.sigma1);

    Vec g, w_next(w.size());
    long double mean_r = 0.0L, m2_r = 0.0L, mean_d = 0.0L, m2_d = 0.0L;
    for (int i = 1; i <= M; ++i) {
        apply_noise(grad_true, nm, rng, g);
        const double gsq = norm_sq(g);
        const double denom = b_sq_before + gsq;
        const double r = gsq / denom;
        const double coef = eta / std::sqrt(denom);
        for (std::size_t j = 0; j < w.size(); ++j) w_next[j] = w[j] - coef * g[j];
        const double drop = f_w - obj.eval(w_next);
        long double delta = r - mean_r;
        mean_r += delta / i;
        m2_r += delta * (r - mean_r);
        delta = drop - mean_d;
        mean_d += delta / i;
        m2_d += delta * (drop - mean_d);
    }
    DescentCheck out;
    out.M = M;
    out.mean_ratio = static_cast<double>(mean_r);
    out.mean_drop = static_cast<double>(mean_d);
    const double se_r = std::sqrt(std::max(static_cast<double>(m2_r), 0.0) / (M - 1) / M);
    const double se_d = std::sqrt(std::max(static_cast<double>(m2_d), 0.0) / (M - 1) / M);
    out.bias_est = 4.0 * std::sqrt(std::max(out.mean_ratio, 0.0));
    const double se_bias = out.mean_ratio > 0 ? 2.0 * se_r / std::sqrt(out.mean_ratio) : 0.0;
    out.drift_coeff = 1.0 - nm.sigma1 * out.bias_est;
    out.lhs = 0.5 * eta_tilde * out.drift_coeff * G2;
    out.rhs = out.mean_drop + c0 * out.mean_ratio;
    const double se_lhs = 0.5 * eta_tilde * G2 * nm.sigma1 * se_bias;
    out.se_combined = std::sqrt(se_lhs * se_lhs + se_d * se_d + (c0 * se_r) * (c0 * se_r));
    out.vacuous = out.drift_coeff < 0;
    out.low_power = M < 1000;
    out.pass = leq_with_tol(out.lhs, out.rhs + se_mult * out.se_combined);
    return out;
}

// Cross-seed frequency check of the accumulator growth event
//   b_s^2 <= b_0^2 + (s sigma0^2 + (1+sigma1^2) E[sum_{t<=s}||grad F_t||^2]) / delta,
// which holds with probability >= 1 - delta. The expectation is replaced by
// the cross-seed mean; the assertion allows three binomial standard errors
// and is skipped below 30 seeds.
struct NiceEventCheck {
    double threshold = 0;
    double violation_frac = 0;
    double slack = 0;
    int n_seeds = 0;
    bool asserted = false;
    bool vacuous = false;
    bool pass = true;
};

inline NiceEventCheck check_nice_event(const std::vector<double>& b_s_sq_per_seed,
                                       double s, double delta, double mean_sum_grad_sq,
                                       double b0_sq, double sigma0, double sigma1) {
    if (b_s_sq_per_seed.empty()) throw std::invalid_argument("need at least one seed");
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    NiceEventCheck out;
    out.n_seeds = static_cast<int>(b_s_sq_per_seed.size());
    if (delta >= 1.0) {
        out.vacuous = true;  // probability floor 1 - delta <= 0
        return out;
    }
    out.threshold = b0_sq + (s * sigma0 * sigma0 + (1.0 + sigma1 * sigma1) * mean_sum_grad_sq) /
                                delta;
    int violations = 0;
    for (double b : b_s_sq_per_seed)
        if (!leq_with_tol(b, out.threshold)) ++violations;
    out.violation_frac = static_cast<double>(violations) / out.n_seeds;
    out.slack = 3.0 * std::sqrt(delta * (1.0 - delta) / out.n_seeds);
    out.asserted = out.n_seeds >= 30;
    out.pass = !out.asserted || out.violation_frac <= delta + out.slack;
    return out;
}

// Cross-seed moments of the bad-time count against their in-expectation
// envelopes:
//   E|S_bad|   <= 64 sigma1^2 ln f(T)
//   E|S_bad|^2 <= (64 sigma1^2 (1 + 128 sigma1^2) + 2) ln^2(T^2 f(T)).
// Counts are coverage-scaled by the caller; below 50% coverage the result is
// report-only.
struct GoodSetStats {
    int n_seeds = 0;
    double mean_bad = 0;
    double meansq_bad = 0;
    double mean_bound = 0;
    double meansq_bound = 0;
    double mean_slack = 0;    // 3 SE of the sample mean
    double meansq_slack = 0;  // 3 SE of the sample mean square
    double min_coverage = 1;
    bool asserted = false;
    bool mean_pass = true;
    bool meansq_pass = true;
};

inline GoodSetStats good_set_statistics(const std::vector<double>& scaled_bad_counts,
                                        double min_coverage, double T,
                                        const ProblemParams& p) {
    if (scaled_bad_counts.empty()) throw std::invalid_argument("need at least one seed");
    GoodSetStats out;
    out.n_seeds = static_cast<int>(scaled_bad_counts.size());
    out.min_coverage = min_coverage;
    long double sum = 0.0L, sum_sq = 0.0L, sum_4 = 0.0L;
    for (double c : scaled_bad_counts) {
        sum += c;
        sum_sq += static_cast<long double>(c) * c;
        sum_4 += static_cast<long double>(c) * c * c * c;
    }
    const int n = out.n_seeds;
    out.mean_bad = static_cast<double>(sum / n);
    out.meansq_bad = static_cast<double>(sum_sq / n);
    const double var_mean =
        std::max(0.0, static_cast<double>(sum_sq / n) - out.mean_bad * out.mean_bad);
    const double var_meansq =
        std::max(0.0, static_cast<double>(sum_4 / n) - out.meansq_bad * out.meansq_bad);
    out.mean_slack = 3.0 * std::sqrt(var_mean / n);
    out.meansq_slack = 3.0 * std::sqrt(var_meansq / n);
    const double s1sq = p.sigma1 * p.sigma1;
    const double fT = f_poly(T, p);
    out.mean_bound = 64.0 * s1sq * std::log(fT);
    const double lg = std::log(T * T * fT);
    out.meansq_bound = (64.0 * s1sq * (1.0 + 128.0 * s1sq) + 2.0) * lg * lg;
    out.asserted = min_coverage >= 0.5;
    if (out.asserted) {
        out.mean_pass = leq_with_tol(out.mean_bad, out.mean_bound + out.mean_slack);
        out.meansq_pass = leq_with_tol(out.meansq_bad, out.meansq_bound + out.meansq_slack);
    }
    return out;
}

}  // namespace adanorm
