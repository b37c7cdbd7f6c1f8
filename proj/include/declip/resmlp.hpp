#pragma once

#include <cstdint>
#include <vector>

#include "declip/embedding.hpp"

namespace declip {

// Residual projector y = normalize(x + W2 * silu(W1 * x + b1)). W2 is
// zero-initialized and carries no bias, so a fresh projector is an exact
// identity on unit inputs. Parameters are doubles kept on the float32 grid
// (every value survives a float32 checkpoint round-trip bit-for-bit).
struct ResMlpParams {
    int dim = 0;    // D, embedding width
    int hidden = 0; // H, latent width
    std::vector<double> w1; // H x D, row-major
    std::vector<double> b1; // H
    std::vector<double> w2; // D x H, row-major

    std::size_t param_count() const { return w1.size() + b1.size() + w2.size(); }
};

// W1 ~ U(-sqrt(6/D), sqrt(6/D)) from the named counter stream; b1 = 0; W2 = 0.
ResMlpParams init_resmlp(int dim, int hidden, std::uint64_t seed, std::string_view stream);

// Intermediate activations cached for the backward pass.
struct ResMlpTrace {
    std::vector<double> input;  // x
    std::vector<double> pre;    // z = W1 x + b1
    std::vector<double> hid;    // h = silu(z)
    std::vector<double> res;    // r = x + W2 h
    double res_norm = 0.0;
    bool rescaled = false;      // whether normalize divided by res_norm
};

struct ResMlpGrads {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;

    void resize_like(const ResMlpParams& p);
    void zero();
};

// `normalize=false` returns the raw residual sum (the normalize_projection
// switch of the model); the trace then marks the output as unrescaled so the
// backward pass stays consistent.
std::vector<double> resmlp_forward(const ResMlpParams& params, const std::vector<double>& x,
                                   ResMlpTrace* trace = nullptr, bool normalize = true);

// Accumulates parameter gradients for upstream gradient d_out; writes the
// input gradient to d_input when non-null.
void resmlp_backward(const ResMlpParams& params, const ResMlpTrace& trace,
                     const std::vector<double>& d_out, ResMlpGrads& grads,
                     std::vector<double>* d_input = nullptr);

inline double silu(double x) { return x / (1.0 + std::exp(-x)); }
inline double silu_derivative(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

} // namespace declip
