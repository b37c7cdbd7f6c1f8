#include "declip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "declip/error.hpp"

namespace declip {

std::vector<double> average_ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * (double(i + 1) + double(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> plcc(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) raise(Errc::length_mismatch, "plcc: inputs have different lengths");
    const std::size_t n = x.size();
    if (n < 2) raise(Errc::length_mismatch, "plcc: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::optional<double> srcc(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) raise(Errc::length_mismatch, "srcc: inputs have different lengths");
    if (x.size() < 2) raise(Errc::length_mismatch, "srcc: need at least 2 points");
    return plcc(average_ranks(x), average_ranks(y));
}

double linear_probe_accuracy(const std::vector<std::vector<double>>& train_x,
                             const std::vector<int>& train_y,
                             const std::vector<std::vector<double>>& test_x,
                             const std::vector<int>& test_y, int n_classes, int iterations,
                             double learning_rate) {
    if (train_x.empty() || test_x.empty()) raise(Errc::invalid_argument, "probe needs data");
    if (train_x.size() != train_y.size() || test_x.size() != test_y.size())
        raise(Errc::length_mismatch, "probe features/labels length mismatch");
    const std::size_t d = train_x[0].size();
    const std::size_t cols = d + 1; // bias column
    std::vector<double> w(std::size_t(n_classes) * cols, 0.0);
    const std::size_t n = train_x.size();

    std::vector<double> logits(n_classes), p(n_classes);
    std::vector<double> grad(w.size());
    for (int it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& xi = train_x[i];
            double max_l = -1e300;
            for (int c = 0; c < n_classes; ++c) {
                const double* row = w.data() + std::size_t(c) * cols;
                double acc = row[d];
                for (std::size_t k = 0; k < d; ++k) acc += row[k] * xi[k];
                logits[c] = acc;
                max_l = std::max(max_l, acc);
            }
            double denom = 0.0;
            for (int c = 0; c < n_classes; ++c) {
                p[c] = std::exp(logits[c] - max_l);
                denom += p[c];
            }
            for (int c = 0; c < n_classes; ++c) {
                const double err = p[c] / denom - (c == train_y[i] ? 1.0 : 0.0);
                double* grow = grad.data() + std::size_t(c) * cols;
                for (std::size_t k = 0; k < d; ++k) grow[k] += err * xi[k];
                grow[d] += err;
            }
        }
        const double scale = learning_rate / static_cast<double>(n);
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= scale * grad[k];
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_x.size(); ++i) {
        const auto& xi = test_x[i];
        int best = 0;
        double best_v = -1e300;
        for (int c = 0; c < n_classes; ++c) {
            const double* row = w.data() + std::size_t(c) * cols;
            double acc = row[d];
            for (std::size_t k = 0; k < d; ++k) acc += row[k] * xi[k];
            if (acc > best_v) {
                best_v = acc;
                best = c;
            }
        }
        if (best == test_y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_x.size());
}

std::vector<double> fit_logistic_remap(const std::vector<double>& score,
                                       const std::vector<double>& mos, int iterations) {
    if (score.size() != mos.size() || score.size() < 4)
        raise(Errc::length_mismatch, "logistic remap needs >= 4 paired points");
    const auto [lo_it, hi_it] = std::minmax_element(mos.begin(), mos.end());
    const auto [slo_it, shi_it] = std::minmax_element(score.begin(), score.end());
    double a = *hi_it, bparam = *lo_it;
    double c = 0.5 * (*slo_it + *shi_it);
    double s = std::max(1e-3, (*shi_it - *slo_it) / 4.0);

    const std::size_t n = score.size();
    const double lr = 0.05;
    for (int it = 0; it < iterations; ++it) {
        double ga = 0, gb = 0, gc = 0, gs = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (score[i] - c) / s;
            const double sig = 1.0 / (1.0 + std::exp(-z));
            const double f = bparam + (a - bparam) * sig;
            const double e = f - mos[i];
            const double dsig = sig * (1.0 - sig);
            ga += e * sig;
            gb += e * (1.0 - sig);
            gc += e * (a - bparam) * dsig * (-1.0 / s);
            gs += e * (a - bparam) * dsig * (-z / s);
        }
        a -= lr * ga / n;
        bparam -= lr * gb / n;
        c -= lr * gc / n;
        s -= lr * gs / n;
        if (std::fabs(s) < 1e-6) s = s < 0 ? -1e-6 : 1e-6;
    }
    return {a, bparam, c, s};
}

double apply_logistic_remap(const std::vector<double>& params, double x) {
    const double z = (x - params[2]) / params[3];
    return params[1] + (params[0] - params[1]) / (1.0 + std::exp(-z));
}

} // namespace declip
