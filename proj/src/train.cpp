#include "declip/train.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"

namespace declip {

TrainConfig TrainConfig::paper_profile() {
    TrainConfig c;
    c.batch_size = 1024;
    c.epochs = 200;
    c.learning_rate = 1e-5;
    c.weight_decay = 5e-2;
    c.tau = 0.07;
    return c;
}

AdamW::AdamW(std::size_t n_params, double lr, double weight_decay)
    : lr_(lr), wd_(weight_decay), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamW::step(std::vector<double*> param_views, const std::vector<const double*>& grad_views,
                 const std::vector<std::size_t>& sizes) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    std::size_t offset = 0;
    for (std::size_t view = 0; view < param_views.size(); ++view) {
        double* p = param_views[view];
        const double* g = grad_views[view];
        for (std::size_t i = 0; i < sizes[view]; ++i) {
            double& m = m_[offset + i];
            double& v = v_[offset + i];
            m = beta1 * m + (1.0 - beta1) * g[i];
            v = beta2 * v + (1.0 - beta2) * g[i] * g[i];
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            const double updated = p[i] - lr_ * (mhat / (std::sqrt(vhat) + eps)) - lr_ * wd_ * p[i];
            p[i] = io::snap_f32(updated);
        }
        offset += sizes[view];
    }
}

namespace {

std::uint64_t encoder_probe(const EncoderBackend& backend, const std::vector<I2TRecord>& dataset) {
    // Fresh encodes (no cache) over a small fixed probe set.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const std::size_t n = std::min<std::size_t>(dataset.size(), 8);
    for (std::size_t i = 0; i < n; ++i) {
        const auto img = backend.encode_image(dataset[i].image_ref).values;
        const auto txt = backend.encode_text(dataset[i].t_p).values;
        const auto img_bytes = io::f32_to_le(img);
        const auto txt_bytes = io::f32_to_le(txt);
        h = rng::fnv1a64(img_bytes.data(), img_bytes.size(), h);
        h = rng::fnv1a64(txt_bytes.data(), txt_bytes.size(), h);
    }
    return h;
}

} // namespace

TrainResult train(DeclipModel& model, const std::vector<I2TRecord>& dataset, const TrainConfig& config) {
    namespace fs = std::filesystem;
    const int b = config.batch_size;
    if (b < 2) raise(Errc::invalid_argument, "batch_size must be >= 2");
    if (config.epochs < 0) raise(Errc::invalid_argument, "epochs must be >= 0");
    if (config.learning_rate < 0.0 || config.weight_decay < 0.0)
        raise(Errc::invalid_argument, "rates must be non-negative");
    if (static_cast<int>(dataset.size()) < b)
        raise(Errc::dataset_too_small, "dataset has " + std::to_string(dataset.size()) +
                                           " records, batch size is " + std::to_string(b));

    model.tau = config.tau;
    TrainResult result;
    result.encoder_probe_before = encoder_probe(*model.encoder, dataset);

    std::ofstream log;
    if (!config.checkpoint_dir.empty()) {
        fs::create_directories(config.checkpoint_dir);
        log.open(fs::path(config.checkpoint_dir) / "train_log.jsonl", std::ios::binary | std::ios::trunc);
        if (!log) raise(Errc::io_error, "cannot open training log in " + config.checkpoint_dir);
    }

    EmbeddingCache cache(model.encoder);
    AdamW optimizer(model.proj_p.param_count() + model.proj_s.param_count(), config.learning_rate,
                    config.weight_decay);
    const std::vector<std::size_t> sizes = {model.proj_p.w1.size(), model.proj_p.b1.size(),
                                            model.proj_p.w2.size(), model.proj_s.w1.size(),
                                            model.proj_s.b1.size(), model.proj_s.w2.size()};
    const std::vector<double*> params = {model.proj_p.w1.data(), model.proj_p.b1.data(),
                                         model.proj_p.w2.data(), model.proj_s.w1.data(),
                                         model.proj_s.b1.data(), model.proj_s.w2.data()};

    const std::uint64_t shuffle_seed = rng::stream_seed(config.seed, "shuffle");
    std::vector<I2TRecord> batch;
    batch.reserve(b);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto order = rng::permutation(rng::stream_seed(shuffle_seed, std::to_string(epoch)),
                                            dataset.size());
        double sum_loss = 0.0, sum_p = 0.0, sum_s = 0.0;
        int n_batches = 0;
        for (std::size_t start = 0; start + 1 < order.size(); start += b) {
            const std::size_t end = std::min(order.size(), start + b);
            if (end - start < 2) break; // a trailing single item cannot form a batch
            batch.clear();
            for (std::size_t k = start; k < end; ++k) batch.push_back(dataset[order[k]]);

            const TotalLossResult step = total_loss(model, batch, cache, true);
            if (!std::isfinite(step.loss)) {
                raise(Errc::non_finite, "non-finite loss at epoch " + std::to_string(epoch) +
                                            " batch " + std::to_string(n_batches) +
                                            "; last good checkpoint kept");
            }
            sum_loss += step.loss;
            sum_p += step.loss_p;
            sum_s += step.loss_s;
            ++n_batches;

            const std::vector<const double*> grads = {step.grads_p.w1.data(), step.grads_p.b1.data(),
                                                      step.grads_p.w2.data(), step.grads_s.w1.data(),
                                                      step.grads_s.b1.data(), step.grads_s.w2.data()};
            optimizer.step(params, grads, sizes);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.mean_loss = sum_loss / n_batches;
        stats.loss_p = sum_p / n_batches;
        stats.loss_s = sum_s / n_batches;
        stats.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.epochs.push_back(stats);

        if (!config.checkpoint_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof(name), "epoch_%04d.ckpt", epoch);
            save_checkpoint(model, (fs::path(config.checkpoint_dir) / name).string());
            nlohmann::json j{{"epoch", stats.epoch},
                             {"mean_loss", stats.mean_loss},
                             {"loss_p", stats.loss_p},
                             {"loss_s", stats.loss_s},
                             {"wall_s", stats.wall_s}};
            log << j.dump() << '\n';
            log.flush();
        }
    }

    if (!config.checkpoint_dir.empty()) {
        result.final_checkpoint = (fs::path(config.checkpoint_dir) / "final.ckpt").string();
        save_checkpoint(model, result.final_checkpoint);
    }
    result.encoder_probe_after = encoder_probe(*model.encoder, dataset);
    return result;
}

} // namespace declip
