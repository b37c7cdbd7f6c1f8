#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "declip/assess.hpp"
#include "declip/model.hpp"

namespace declip {

// Learnable prompt context for a frozen model. The effective prompt embedding
// is normalize(anchor + mean(context rows)); rows warm-started as copies of
// the anchor reproduce the hand-written prompt scores.
struct PromptVector {
    int dim = 0;
    int m = 16;            // context rows per class
    bool per_class = true; // false: one shared context for both classes
    std::vector<double> ctx_pos; // m x dim (aliases ctx_neg when shared)
    std::vector<double> ctx_neg;
    std::vector<double> anchor_pos;
    std::vector<double> anchor_neg;
    std::string positive_text;
    std::string negative_text;
};

PromptVector init_prompt_vector(const DeclipModel& model, const AntonymPromptPair& prompts, int m = 16,
                                bool per_class = true);

// Effective f_TP / f_TN for the current context.
std::vector<double> composed_positive(const PromptVector& pv);
std::vector<double> composed_negative(const PromptVector& pv);

double coop_score(const DeclipModel& model, const PromptVector& pv, const std::string& image_ref);

struct CoopConfig {
    int m = 16;
    bool per_class = true;
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-2;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
};

struct CoopResult {
    PromptVector prompt;
    std::vector<double> epoch_loss;
};

// Fits the context rows so the two-way softmax score regresses min-max
// normalized MOS (mean squared error). The model is frozen throughout; only
// context rows move.
CoopResult coop_tune(const DeclipModel& model, const std::vector<MosItem>& train_items,
                     const AntonymPromptPair& prompts, const CoopConfig& config);

// JSON file with base64 float32 blobs, format tag "DECLIP-PROMPT v1".
void save_prompt_vector(const PromptVector& pv, const std::string& path);
PromptVector load_prompt_vector(const std::string& path);

} // namespace declip
