#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "declip/assess.hpp"
#include "declip/i2t.hpp"
#include "declip/image.hpp"

namespace declip {

// One benchmark item with its ground-truth factor indices.
struct BenchItem {
    std::string image_ref;
    int perc = 0; // blur level, 0 = sharpest
    int sem = 0;  // shape class
};

struct SyntheticBenchmark {
    std::vector<Image> images; // parallel to records
    std::vector<I2TRecord> records;
    std::vector<BenchItem> truth;
    int n_perc = 0;
    int n_sem = 0;
};

// Word pools the texts draw from; tests scan against these to confirm the
// texts stay decoupled.
const std::vector<std::string>& perceptual_factor_words();
const std::vector<std::string>& semantic_factor_words();

// Deterministic toy benchmark: pixel statistics encode the perceptual factor
// (progressive box blur), layout encodes the semantic factor (shape class).
// T_p speaks only about sharpness/quality, T_s only about the depicted shape.
// Items fill the (perc, sem) grid round-robin, so cell sizes differ by at
// most one. Up to 6 shape classes are available.
SyntheticBenchmark make_synthetic_benchmark(std::uint64_t seed, int n_items, int n_perc_factors,
                                            int n_sem_factors);

// Materializes images/ (PPM), dataset.jsonl, factors.csv, mos.csv (MOS :=
// inverted blur level, duplicated as a "sharpness" attribute column) and
// meta.json under out_dir.
void write_benchmark(const SyntheticBenchmark& bench, const std::string& out_dir,
                     std::uint64_t seed);

std::vector<MosItem> benchmark_mos_items(const SyntheticBenchmark& bench);

} // namespace declip
