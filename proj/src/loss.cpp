#include "declip/loss.hpp"

#include <cmath>

#include "declip/error.hpp"

namespace declip {

EmbeddingBatch make_batch(int rows, int dim) {
    EmbeddingBatch b;
    b.rows = rows;
    b.dim = dim;
    b.data.assign(std::size_t(rows) * dim, 0.0);
    return b;
}

double contrastive_loss(const EmbeddingBatch& img, const EmbeddingBatch& txt, double tau,
                        EmbeddingBatch* d_img, EmbeddingBatch* d_txt) {
    const int b = img.rows;
    const int d = img.dim;
    if (b < 2) raise(Errc::degenerate_batch, "contrastive loss needs B >= 2");
    if (txt.rows != b || txt.dim != d) raise(Errc::dimension_mismatch, "image/text batch shape mismatch");
    if (!(tau > 0.0)) raise(Errc::invalid_argument, "temperature must be positive");
    for (double v : img.data)
        if (!std::isfinite(v)) raise(Errc::non_finite, "non-finite image embedding in batch");
    for (double v : txt.data)
        if (!std::isfinite(v)) raise(Errc::non_finite, "non-finite text embedding in batch");

    if (d_img) *d_img = make_batch(b, d);
    if (d_txt) *d_txt = make_batch(b, d);

    // softmax row by row with max-shift; p[j] reused for the gradient.
    std::vector<double> logits(b), p(b);
    double loss = 0.0;
    const double inv_btau = 1.0 / (b * tau);
    for (int i = 0; i < b; ++i) {
        const double* xi = img.row(i);
        double max_logit = -1e300;
        for (int j = 0; j < b; ++j) {
            const double* tj = txt.row(j);
            double dotv = 0.0;
            for (int k = 0; k < d; ++k) dotv += xi[k] * tj[k];
            logits[j] = dotv / tau;
            if (logits[j] > max_logit) max_logit = logits[j];
        }
        double denom = 0.0;
        for (int j = 0; j < b; ++j) {
            p[j] = std::exp(logits[j] - max_logit);
            denom += p[j];
        }
        loss += -(logits[i] - max_logit) + std::log(denom);

        if (d_img || d_txt) {
            for (int j = 0; j < b; ++j) {
                const double w = (p[j] / denom - (i == j ? 1.0 : 0.0)) * inv_btau;
                if (d_img) {
                    double* gi = d_img->row(i);
                    const double* tj = txt.row(j);
                    for (int k = 0; k < d; ++k) gi[k] += w * tj[k];
                }
                if (d_txt) {
                    double* gj = d_txt->row(j);
                    for (int k = 0; k < d; ++k) gj[k] += w * xi[k];
                }
            }
        }
    }
    return loss / b;
}

} // namespace declip
