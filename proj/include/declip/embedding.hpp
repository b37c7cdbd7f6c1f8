#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "declip/error.hpp"

namespace declip {

// Fixed-dimension real vector produced by an encoder or projector. Values are
// held as doubles; anything that touches disk is snapped to the float32 grid
// first so file round-trips are bit-exact.
struct EmbeddingVector {
    std::vector<double> values;
    bool normalized = false;

    int dim() const { return static_cast<int>(values.size()); }
};

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Tolerance of the `normalized` flag: unit within 1e-6.
inline constexpr double kUnitTolerance = 1e-6;

// Rescales v to unit length. A vector already unit within kUnitTolerance is
// returned unchanged, which keeps normalization idempotent at the bit level
// and makes zero-initialized projectors an exact identity.
inline void normalize_in_place(std::vector<double>& v) {
    const double n = l2_norm(v);
    if (!std::isfinite(n) || n == 0.0)
        raise(Errc::non_finite, "cannot normalize zero or non-finite vector");
    if (std::fabs(n - 1.0) <= kUnitTolerance) return;
    for (double& x : v) x /= n;
}

inline std::vector<double> normalized(std::vector<double> v) {
    normalize_in_place(v);
    return v;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) raise(Errc::dimension_mismatch, "cosine: dimension mismatch");
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) raise(Errc::non_finite, "cosine of zero vector");
    return dot(a, b) / (na * nb);
}

} // namespace declip
