#include "declip/resmlp.hpp"

#include <cmath>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"

namespace declip {

ResMlpParams init_resmlp(int dim, int hidden, std::uint64_t seed, std::string_view stream) {
    if (dim < 1 || hidden < 1) raise(Errc::invalid_argument, "resmlp dims must be positive");
    ResMlpParams p;
    p.dim = dim;
    p.hidden = hidden;
    p.w1.resize(std::size_t(hidden) * dim);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(std::size_t(dim) * hidden, 0.0);
    const std::uint64_t s = rng::stream_seed(seed, stream);
    const double bound = std::sqrt(6.0 / dim);
    for (std::size_t i = 0; i < p.w1.size(); ++i)
        p.w1[i] = io::snap_f32(rng::uniform_range(s, i, -bound, bound));
    return p;
}

void ResMlpGrads::resize_like(const ResMlpParams& p) {
    w1.assign(p.w1.size(), 0.0);
    b1.assign(p.b1.size(), 0.0);
    w2.assign(p.w2.size(), 0.0);
}

void ResMlpGrads::zero() {
    std::fill(w1.begin(), w1.end(), 0.0);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
}

std::vector<double> resmlp_forward(const ResMlpParams& params, const std::vector<double>& x,
                                   ResMlpTrace* trace, bool normalize) {
    const int d = params.dim;
    const int h = params.hidden;
    if (static_cast<int>(x.size()) != d)
        raise(Errc::dimension_mismatch, "resmlp_forward: input has dim " + std::to_string(x.size()) +
                                            ", expected " + std::to_string(d));

    std::vector<double> z(h);
    for (int i = 0; i < h; ++i) {
        const double* row = params.w1.data() + std::size_t(i) * d;
        double acc = params.b1[i];
        for (int j = 0; j < d; ++j) acc += row[j] * x[j];
        z[i] = acc;
    }
    std::vector<double> hid(h);
    for (int i = 0; i < h; ++i) hid[i] = silu(z[i]);

    std::vector<double> res(d);
    for (int i = 0; i < d; ++i) {
        const double* row = params.w2.data() + std::size_t(i) * h;
        double acc = x[i];
        for (int j = 0; j < h; ++j) acc += row[j] * hid[j];
        res[i] = acc;
    }

    const double norm = l2_norm(res);
    if (!std::isfinite(norm) || (normalize && norm == 0.0))
        raise(Errc::non_finite, "resmlp output has zero or non-finite norm");
    const bool rescale = normalize && std::fabs(norm - 1.0) > kUnitTolerance;
    std::vector<double> out = res;
    if (rescale)
        for (double& v : out) v /= norm;

    if (trace) {
        trace->input = x;
        trace->pre = std::move(z);
        trace->hid = std::move(hid);
        trace->res = std::move(res);
        trace->res_norm = norm;
        trace->rescaled = rescale;
    }
    return out;
}

void resmlp_backward(const ResMlpParams& params, const ResMlpTrace& trace,
                     const std::vector<double>& d_out, ResMlpGrads& grads,
                     std::vector<double>* d_input) {
    const int d = params.dim;
    const int h = params.hidden;
    if (static_cast<int>(d_out.size()) != d) raise(Errc::dimension_mismatch, "resmlp_backward: bad d_out");

    // Through y = r / ||r||: dr = (dy - y (y . dy)) / ||r||.
    std::vector<double> d_res(d);
    if (trace.rescaled) {
        const double inv = 1.0 / trace.res_norm;
        double y_dot = 0.0;
        for (int i = 0; i < d; ++i) y_dot += trace.res[i] * inv * d_out[i];
        for (int i = 0; i < d; ++i) d_res[i] = (d_out[i] - trace.res[i] * inv * y_dot) * inv;
    } else {
        d_res = d_out;
    }

    // r = x + W2 h.
    std::vector<double> d_hid(h, 0.0);
    for (int i = 0; i < d; ++i) {
        const double g = d_res[i];
        double* grow = grads.w2.data() + std::size_t(i) * h;
        const double* wrow = params.w2.data() + std::size_t(i) * h;
        for (int j = 0; j < h; ++j) {
            grow[j] += g * trace.hid[j];
            d_hid[j] += g * wrow[j];
        }
    }

    // h = silu(z), z = W1 x + b1.
    std::vector<double> d_pre(h);
    for (int j = 0; j < h; ++j) d_pre[j] = d_hid[j] * silu_derivative(trace.pre[j]);
    for (int j = 0; j < h; ++j) {
        grads.b1[j] += d_pre[j];
        double* grow = grads.w1.data() + std::size_t(j) * d;
        const double g = d_pre[j];
        for (int i = 0; i < d; ++i) grow[i] += g * trace.input[i];
    }

    if (d_input) {
        d_input->assign(d, 0.0);
        for (int i = 0; i < d; ++i) (*d_input)[i] = d_res[i];
        for (int j = 0; j < h; ++j) {
            const double g = d_pre[j];
            const double* wrow = params.w1.data() + std::size_t(j) * d;
            for (int i = 0; i < d; ++i) (*d_input)[i] += g * wrow[i];
        }
    }
}

} // namespace declip
