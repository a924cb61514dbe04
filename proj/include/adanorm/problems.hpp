#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "adanorm/rng.hpp"
#include "adanorm/vec.hpp"

namespace adanorm {

// A differentiable objective with known global smoothness constant and
// infimum, plus a designated starting point.
class Objective {
  public:
    virtual ~Objective() = default;
    virtual int dim() const = 0;
    virtual double eval(const Vec& w) const = 0;
    virtual void grad(const Vec& w, Vec& out) const = 0;
    virtual double smoothness() const = 0;
    virtual double infimum() const = 0;
    virtual const Vec& initial_point() const = 0;

    Vec grad_at(const Vec& w) const {
        Vec g(static_cast<std::size_t>(dim()));
        grad(w, g);
        return g;
    }
};

// F(w) = 1/2 w^T A w with A = diag(a), a_i > 0. L = max_i a_i, inf F = 0.
class Quadratic final : public Objective {
  public:
    Quadratic(Vec diag, Vec w1) : a_(std::move(diag)), w1_(std::move(w1)) {
        if (a_.empty() || a_.size() != w1_.size())
            throw std::invalid_argument("quadratic: diag and w1 sizes must match");
        L_ = 0;
        for (double ai : a_) {
            if (!(ai > 0)) throw std::invalid_argument("quadratic: diagonal must be positive");
            L_ = std::max(L_, ai);
        }
    }

    int dim() const override { return static_cast<int>(a_.size()); }

    double eval(const Vec& w) const override {
        long double s = 0.0L;
        for (std::size_t i = 0; i < a_.size(); ++i)
            s += 0.5L * a_[i] * w[i] * w[i];
        return static_cast<double>(s);
    }

    void grad(const Vec& w, Vec& out) const override {
        out.resize(a_.size());
        for (std::size_t i = 0; i < a_.size(); ++i) out[i] = a_[i] * w[i];
    }

    double smoothness() const override { return L_; }
    double infimum() const override { return 0.0; }
    const Vec& initial_point() const override { return w1_; }
    const Vec& diagonal() const { return a_; }

  private:
    Vec a_;
    Vec w1_;
    double L_ = 0;
};

// F(w) = sum_i ln(1 + w_i^2): non-convex, bounded gradients, L = 2, inf F = 0.
class LogHump final : public Objective {
  public:
    LogHump(int d, Vec w1) : w1_(std::move(w1)) {
        if (d < 1 || static_cast<std::size_t>(d) != w1_.size())
            throw std::invalid_argument("loghump: dimension must match w1");
    }

    int dim() const override { return static_cast<int>(w1_.size()); }

    double eval(const Vec& w) const override {
        long double s = 0.0L;
        for (double x : w) s += std::log1p(static_cast<long double>(x) * x);
        return static_cast<double>(s);
    }

    void grad(const Vec& w, Vec& out) const override {
        out.resize(w1_.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            out[i] = 2.0 * w[i] / (1.0 + w[i] * w[i]);
    }

    double smoothness() const override { return 2.0; }
    double infimum() const override { return 0.0; }
    const Vec& initial_point() const override { return w1_; }

  private:
    Vec w1_;
};

// F(w) = sum_i w_i^2/(1 + w_i^2) + (eps/2)||w||^2: non-convex with flat
// far-field humps, L = 2 + eps, inf F = 0.
class ShiftedQuarticSmoothed final : public Objective {
  public:
    ShiftedQuarticSmoothed(int d, double eps, Vec w1) : eps_(eps), w1_(std::move(w1)) {
        if (d < 1 || static_cast<std::size_t>(d) != w1_.size())
            throw std::invalid_argument("shifted_quartic_smoothed: dimension must match w1");
        if (eps < 0) throw std::invalid_argument("shifted_quartic_smoothed: eps must be >= 0");
    }

    int dim() const override { return static_cast<int>(w1_.size()); }

    double eval(const Vec& w) const override {
        long double s = 0.0L;
        for (double x : w) {
            const long double x2 = static_cast<long double>(x) * x;
            s += x2 / (1.0L + x2) + 0.5L * eps_ * x2;
        }
        return static_cast<double>(s);
    }

    void grad(const Vec& w, Vec& out) const override {
        out.resize(w1_.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double x = w[i];
            const double q = 1.0 + x * x;
            out[i] = 2.0 * x / (q * q) + eps_ * x;
        }
    }

    double smoothness() const override { return 2.0 + eps_; }
    double infimum() const override { return 0.0; }
    const Vec& initial_point() const override { return w1_; }
    double epsilon() const { return eps_; }

  private:
    double eps_;
    Vec w1_;
};

enum class NoiseFamily { gaussian, bounded };

// Stochastic gradient oracle g with E[g] = grad F and
// E||g - grad F||^2 = sigma0^2 + sigma1^2 ||grad F||^2 (exact equality by
// construction for both families).
struct NoiseModel {
    double sigma0 = 0;
    double sigma1 = 0;
    NoiseFamily family = NoiseFamily::gaussian;
};

inline NoiseModel make_noise(double sigma0, double sigma1, NoiseFamily family) {
    if (sigma0 < 0 || sigma1 < 0 || !std::isfinite(sigma0) || !std::isfinite(sigma1))
        throw std::invalid_argument("noise levels must be finite and >= 0");
    return NoiseModel{sigma0, sigma1, family};
}

// g = (1 + sigma1 xi) grad + sigma0 zeta / sqrt(d). Draw order is fixed (xi
// first, then zeta by coordinate) so streams replay exactly.
//   gaussian: xi ~ N(0,1), zeta_i ~ N(0,1)
//   bounded:  xi Rademacher, zeta_i ~ U[-sqrt(3), sqrt(3)]   (variance 1)
// Bounded family satisfies ||g - grad|| <= sigma1 ||grad|| + sqrt(3) sigma0.
inline void apply_noise(const Vec& grad_true, const NoiseModel& nm, RngStream& rng, Vec& out) {
    const std::size_t d = grad_true.size();
    out.resize(d);
    const double root3 = 1.7320508075688772935;
    double xi;
    if (nm.family == NoiseFamily::gaussian) {
        xi = rng.normal();
    } else {
        xi = rng.rademacher();
    }
    const double mult = 1.0 + nm.sigma1 * xi;
    const double add_scale = nm.sigma0 / std::sqrt(static_cast<double>(d));
    if (nm.family == NoiseFamily::gaussian) {
        for (std::size_t i = 0; i < d; ++i)
            out[i] = mult * grad_true[i] + add_scale * rng.normal();
    } else {
        for (std::size_t i = 0; i < d; ++i)
            out[i] = mult * grad_true[i] + add_scale * rng.uniform_pm(root3);
    }
}

inline Vec sample_gradient(const Objective& obj, const NoiseModel& nm, const Vec& w,
                           RngStream& rng) {
    Vec g_true = obj.grad_at(w);
    Vec g;
    apply_noise(g_true, nm, rng, g);
    return g;
}

// M independent draws at a fixed iterate, consuming only the given stream.
inline std::vector<Vec> resample_at(const Objective& obj, const NoiseModel& nm, const Vec& w,
                                    int M, RngStream& rng) {
    if (M < 1) throw std::invalid_argument("resample_at: M must be >= 1");
    Vec g_true = obj.grad_at(w);
    std::vector<Vec> draws(static_cast<std::size_t>(M));
    for (auto& g : draws) apply_noise(g_true, nm, rng, g);
    return draws;
}

}  // namespace adanorm
