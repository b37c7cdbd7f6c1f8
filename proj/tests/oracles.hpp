// Independent oracles for derived expected values. Everything here is written
// straight-line from the definitions and stays off the library's code paths
// it checks (shared helpers are limited to RNG-based instance generation).
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// O(n^2) average ranks by counting, no sorting: rank_i = #less + (#equal+1)/2.
inline std::vector<double> counting_ranks(const std::vector<double>& x) {
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t less = 0, equal = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] < x[i]) ++less;
            if (x[j] == x[i]) ++equal;
        }
        ranks[i] = static_cast<double>(less) + 0.5 * static_cast<double>(equal + 1);
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(counting_ranks(x), counting_ranks(y));
}

// Straight-line image-anchored InfoNCE from the definition (no max-shift).
inline double infonce(const std::vector<std::vector<double>>& img,
                      const std::vector<std::vector<double>>& txt, double tau) {
    const std::size_t b = img.size();
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double denom = 0.0;
        double diag = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < img[i].size(); ++k) d += img[i][k] * txt[j][k];
            denom += std::exp(d / tau);
            if (j == i) diag = std::exp(d / tau);
        }
        total += -std::log(diag / denom);
    }
    return total / static_cast<double>(b);
}

// Projector forward restated from the definition, including the documented
// skip-if-already-unit normalization rule.
inline std::vector<double> resmlp(const std::vector<double>& w1, const std::vector<double>& b1,
                                  const std::vector<double>& w2, const std::vector<double>& x,
                                  bool normalize = true) {
    const std::size_t d = x.size();
    const std::size_t h = b1.size();
    std::vector<double> hid(h);
    for (std::size_t i = 0; i < h; ++i) {
        double z = b1[i];
        for (std::size_t j = 0; j < d; ++j) z += w1[i * d + j] * x[j];
        hid[i] = z / (1.0 + std::exp(-z));
    }
    std::vector<double> r(d);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = x[i];
        for (std::size_t j = 0; j < h; ++j) acc += w2[i * h + j] * hid[j];
        r[i] = acc;
    }
    if (!normalize) return r;
    double norm = 0.0;
    for (double v : r) norm += v * v;
    norm = std::sqrt(norm);
    if (std::fabs(norm - 1.0) <= 1e-6) return r;
    for (double& v : r) v /= norm;
    return r;
}

// Central finite difference of a scalar function over a flat parameter view.
template <typename Fn>
std::vector<double> central_differences(std::vector<double>& params, double h, Fn&& fn) {
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double fp = fn();
        params[i] = keep - h;
        const double fm = fn();
        params[i] = keep;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

// ||a - b||_2 / max(||a||, ||b||, floor)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b,
                             double floor = 1e-12) {
    double na = 0, nb = 0, nd = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i] * a[i];
        nb += b[i] * b[i];
        nd += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(nd) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

} // namespace oracle
