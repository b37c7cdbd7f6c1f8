#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "declip/embedding.hpp"
#include "declip/image.hpp"

namespace declip {

enum class BackendKind { precomputed_store, toy_deterministic, remote_service };

std::string to_string(BackendKind kind);

struct BackendMetadata {
    BackendKind kind = BackendKind::toy_deterministic;
    int dim = 0;
    std::string identifier; // backend name + version
    std::uint64_t seed = 0; // meaningful for the toy backend only
};

// Frozen embedding source. Implementations are immutable after construction
// and safe for concurrent read-only queries.
class EncoderBackend {
public:
    virtual ~EncoderBackend() = default;

    virtual EmbeddingVector encode_image(const std::string& image_ref) const = 0;
    virtual EmbeddingVector encode_text(const std::string& text) const = 0;

    int dim() const { return meta_.dim; }
    const BackendMetadata& metadata() const { return meta_; }

protected:
    explicit EncoderBackend(BackendMetadata meta) : meta_(std::move(meta)) {}
    BackendMetadata meta_;
};

// Deterministic desk-scale stand-in for a pretrained dual encoder.
//
// Text: lowercase, split on non-alphanumerics, hash each token (FNV-1a 64)
// into a 4096-bin count vector, append a constant-one component, multiply by
// a seeded Gaussian matrix, L2-normalize. Order-invariant by construction.
//
// Image: average-pool luma to 16x16, flatten, append 8 global statistics
// (luma mean, luma variance, gradient-magnitude mean, Laplacian variance,
// R/G/B channel means, dynamic range) and a constant-one component, multiply
// by a seeded Gaussian matrix, L2-normalize. The statistics carry sharpness
// and exposure signal so synthetic disentanglement runs are meaningful.
class ToyEncoder : public EncoderBackend {
public:
    static constexpr int kTextBins = 4096;
    static constexpr int kPatchSide = 16;
    static constexpr int kImageFeatures = kPatchSide * kPatchSide + 8 + 1;

    explicit ToyEncoder(int dim = 64, std::uint64_t seed = 17, std::string image_root = "");

    EmbeddingVector encode_image(const std::string& image_ref) const override;
    EmbeddingVector encode_text(const std::string& text) const override;

    // Direct pixel-buffer entry point (the path loader feeds this).
    EmbeddingVector encode_image_pixels(const Image& img) const;

    static std::vector<double> image_features(const Image& img);

private:
    std::string image_root_;
    std::vector<double> text_proj_;  // (kTextBins + 1) x dim, row-major
    std::vector<double> image_proj_; // kImageFeatures x dim, row-major
};

// Lookup table of embeddings dumped by an external tool (e.g. a real CLIP).
// Both modalities resolve by exact key; values are L2-normalized on query.
class StoreBackend : public EncoderBackend {
public:
    StoreBackend(int dim, std::map<std::string, std::vector<double>> entries, std::string identifier);

    EmbeddingVector encode_image(const std::string& image_ref) const override;
    EmbeddingVector encode_text(const std::string& text) const override;

    std::size_t size() const { return entries_.size(); }
    bool contains(const std::string& key) const { return entries_.count(key) != 0; }

private:
    EmbeddingVector lookup(const std::string& key) const;
    std::map<std::string, std::vector<double>> entries_;
};

// Embedding store file: header "DECLIP-EMB v1 dim=<D> count=<N>" then N lines
// "key<TAB>base64(float32 little-endian array of length D)".
std::shared_ptr<StoreBackend> load_embedding_store(const std::string& path);
void save_embedding_store(const std::string& path, int dim,
                          const std::map<std::string, std::vector<double>>& entries);

// HTTP POST /encode {"modality":"image"|"text","payload":...} returning
// {"dim":D,"values":[...]}. 10 s timeout, no retries at this layer.
class RemoteBackend : public EncoderBackend {
public:
    RemoteBackend(std::string base_url, int dim);

    EmbeddingVector encode_image(const std::string& image_ref) const override;
    EmbeddingVector encode_text(const std::string& text) const override;

private:
    EmbeddingVector request(const std::string& modality, const std::string& payload) const;
    std::string base_url_;
};

} // namespace declip
