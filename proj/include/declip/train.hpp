#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "declip/model.hpp"

namespace declip {

struct TrainConfig {
    int batch_size = 32;
    int epochs = 50;
    double learning_rate = 3e-3;
    double weight_decay = 5e-2;
    double tau = 0.07;
    std::uint64_t seed = 0;
    std::string checkpoint_dir; // empty: keep everything in memory

    // Large-scale profile from the reference training recipe; desk-scale runs
    // use the defaults above.
    static TrainConfig paper_profile();
};

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double loss_p = 0.0;
    double loss_s = 0.0;
    double wall_s = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> epochs;
    std::string final_checkpoint;              // empty when checkpoint_dir unset
    std::uint64_t encoder_probe_before = 0;    // frozen-backbone verification hook
    std::uint64_t encoder_probe_after = 0;
};

// AdamW with decoupled weight decay: beta = (0.9, 0.999), eps = 1e-8; both
// the moment step and the decay are scaled by lr. Moments are doubles;
// parameters return to the float32 grid after every step.
class AdamW {
public:
    AdamW(std::size_t n_params, double lr, double weight_decay);
    void step(std::vector<double*> param_views, const std::vector<const double*>& grad_views,
              const std::vector<std::size_t>& sizes);

private:
    double lr_;
    double wd_;
    std::uint64_t t_ = 0;
    std::vector<double> m_, v_;
};

// Shuffled mini-batch loop over the dataset; only projector parameters are
// updated. Deterministic per (seed, data order). Per-epoch checkpoints and a
// JSONL log land in checkpoint_dir when set. Non-finite loss aborts the run
// with the last good checkpoint left on disk.
TrainResult train(DeclipModel& model, const std::vector<I2TRecord>& dataset, const TrainConfig& config);

} // namespace declip
