#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace adanorm {

using Vec = std::vector<double>;

// Sums of squares accumulate in long double, in index order, so that the
// b-accumulator chain replays bit-exactly and keeps extra headroom.
inline long double norm_sq_ld(const Vec& v) {
    long double s = 0.0L;
    for (double x : v) s += static_cast<long double>(x) * x;
    return s;
}

inline double norm_sq(const Vec& v) { return static_cast<double>(norm_sq_ld(v)); }

inline double norm(const Vec& v) { return std::sqrt(norm_sq(v)); }

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double dist(const Vec& a, const Vec& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = static_cast<long double>(a[i]) - b[i];
        s += d * d;
    }
    return std::sqrt(static_cast<double>(s));
}

}  // namespace adanorm
