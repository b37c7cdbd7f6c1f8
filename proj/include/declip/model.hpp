#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "declip/encoders.hpp"
#include "declip/i2t.hpp"
#include "declip/loss.hpp"
#include "declip/resmlp.hpp"

namespace declip {

// Frozen dual encoder plus the two trainable residual projectors. Everything
// except projector parameters is immutable; trained models are safe for
// concurrent inference.
struct DeclipModel {
    std::shared_ptr<const EncoderBackend> encoder;
    ResMlpParams proj_p;
    ResMlpParams proj_s;
    double tau = 0.07;
    bool normalize_projection = true;
    std::uint64_t init_seed = 0;

    int dim() const { return encoder->dim(); }
};

DeclipModel make_declip_model(std::shared_ptr<const EncoderBackend> encoder, int hidden = 1024,
                              double tau = 0.07, std::uint64_t seed = 0);

EmbeddingVector project_perceptual(const DeclipModel& model, const std::string& image_ref);
EmbeddingVector project_semantic(const DeclipModel& model, const std::string& image_ref);

// FNV-1a over the float32 little-endian image of all projector parameters in
// checkpoint order; the hex form doubles as the model/checkpoint id.
std::uint64_t param_checksum(const DeclipModel& model);

// Read-through cache in front of a frozen backend. Lookups never hit the
// backend twice for one key.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::shared_ptr<const EncoderBackend> backend)
        : backend_(std::move(backend)) {}

    const std::vector<double>& image(const std::string& ref);
    const std::vector<double>& text(const std::string& text);

private:
    std::shared_ptr<const EncoderBackend> backend_;
    std::map<std::string, std::vector<double>> images_;
    std::map<std::string, std::vector<double>> texts_;
};

struct TotalLossResult {
    double loss = 0.0;
    double loss_p = 0.0;
    double loss_s = 0.0;
    ResMlpGrads grads_p;
    ResMlpGrads grads_s;
};

// L = L_p + L_s (Eq. of the dual objective): L_p contrasts the perceptual
// projection against T_p embeddings, L_s the semantic projection against T_s.
// Gradients flow only into projector parameters; the encoder is frozen.
// `with_grads=false` skips the backward pass.
TotalLossResult total_loss(const DeclipModel& model, const std::vector<I2TRecord>& batch,
                           EmbeddingCache& cache, bool with_grads = true);

// Checkpoint file: "DECLIP-CKPT v1" + one-line JSON metadata + raw
// little-endian float32 blobs in order W1_p, b1_p, W2_p, W1_s, b1_s, W2_s.
void save_checkpoint(const DeclipModel& model, const std::string& path);

// Restores parameters bitwise. The provided encoder must match the stored
// dimension (Errc::dimension_mismatch otherwise).
DeclipModel load_checkpoint(const std::string& path, std::shared_ptr<const EncoderBackend> encoder);

// Header + metadata only; lets callers reconstruct a matching encoder before
// the full load.
struct CheckpointInfo {
    int dim = 0;
    int hidden = 0;
    double tau = 0.07;
    std::uint64_t seed = 0;
    BackendMetadata encoder;
};
CheckpointInfo peek_checkpoint(const std::string& path);

std::string checkpoint_id(const std::string& path);

} // namespace declip
