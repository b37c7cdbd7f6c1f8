#pragma once

#include <vector>

namespace declip {

// Batched embeddings, row-major: B rows of dimension D.
struct EmbeddingBatch {
    int rows = 0;
    int dim = 0;
    std::vector<double> data;

    double* row(int i) { return data.data() + std::size_t(i) * dim; }
    const double* row(int i) const { return data.data() + std::size_t(i) * dim; }
};

EmbeddingBatch make_batch(int rows, int dim);

// Image-anchored InfoNCE over one batch:
//   L = -(1/B) sum_i log( exp(img_i . txt_i / tau) / sum_j exp(img_i . txt_j / tau) )
// Rows are anchors, softmax runs over text columns. Inputs are expected
// unit-norm; tau > 0; B >= 2.
double contrastive_loss(const EmbeddingBatch& img, const EmbeddingBatch& txt, double tau,
                        EmbeddingBatch* d_img = nullptr, EmbeddingBatch* d_txt = nullptr);

} // namespace declip
