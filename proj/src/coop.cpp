#include "declip/coop.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"
#include "declip/train.hpp"

namespace declip {

using nlohmann::json;

namespace {

std::vector<double> compose(const std::vector<double>& anchor, const std::vector<double>& ctx, int m,
                            int dim) {
    std::vector<double> u = anchor;
    const double inv_m = 1.0 / m;
    for (int r = 0; r < m; ++r) {
        const double* row = ctx.data() + std::size_t(r) * dim;
        for (int k = 0; k < dim; ++k) u[k] += inv_m * row[k];
    }
    return u;
}

} // namespace

PromptVector init_prompt_vector(const DeclipModel& model, const AntonymPromptPair& prompts, int m,
                                bool per_class) {
    prompts.validate();
    if (m < 1) raise(Errc::invalid_argument, "prompt vector needs m >= 1 context rows");
    PromptVector pv;
    pv.dim = model.dim();
    pv.m = m;
    pv.per_class = per_class;
    pv.positive_text = prompts.positive;
    pv.negative_text = prompts.negative;
    pv.anchor_pos = model.encoder->encode_text(prompts.positive).values;
    pv.anchor_neg = model.encoder->encode_text(prompts.negative).values;

    auto tiled = [&](const std::vector<double>& anchor) {
        std::vector<double> ctx(std::size_t(m) * pv.dim);
        for (int r = 0; r < m; ++r)
            std::copy(anchor.begin(), anchor.end(), ctx.begin() + std::size_t(r) * pv.dim);
        return ctx;
    };
    if (per_class) {
        pv.ctx_pos = tiled(pv.anchor_pos);
        pv.ctx_neg = tiled(pv.anchor_neg);
    } else {
        // one shared context, warm-started at the midpoint of the anchors
        std::vector<double> mid(pv.dim);
        for (int k = 0; k < pv.dim; ++k) mid[k] = 0.5 * (pv.anchor_pos[k] + pv.anchor_neg[k]);
        pv.ctx_pos = tiled(mid);
        pv.ctx_neg = pv.ctx_pos;
    }
    return pv;
}

std::vector<double> composed_positive(const PromptVector& pv) {
    return normalized(compose(pv.anchor_pos, pv.ctx_pos, pv.m, pv.dim));
}

std::vector<double> composed_negative(const PromptVector& pv) {
    return normalized(compose(pv.anchor_neg, pv.ctx_neg, pv.m, pv.dim));
}

double coop_score(const DeclipModel& model, const PromptVector& pv, const std::string& image_ref) {
    const std::vector<double> x = project_perceptual(model, image_ref).values;
    return score_from_embeddings(x, composed_positive(pv), composed_negative(pv));
}

CoopResult coop_tune(const DeclipModel& model, const std::vector<MosItem>& train_items,
                     const AntonymPromptPair& prompts, const CoopConfig& config) {
    if (static_cast<int>(train_items.size()) < std::max(2, config.batch_size))
        raise(Errc::dataset_too_small, "coop_tune needs at least batch_size items");

    double lo = train_items[0].mos, hi = train_items[0].mos;
    for (const auto& it : train_items) {
        lo = std::min(lo, it.mos);
        hi = std::max(hi, it.mos);
    }
    if (hi == lo) raise(Errc::dataset_too_small, "coop_tune needs non-constant MOS");

    CoopResult result;
    result.prompt = init_prompt_vector(model, prompts, config.m, config.per_class);
    PromptVector& pv = result.prompt;
    const int d = pv.dim;
    const int m = pv.m;

    // Frozen image tower: project every item once.
    std::vector<std::vector<double>> x(train_items.size());
    std::vector<double> target(train_items.size());
    for (std::size_t i = 0; i < train_items.size(); ++i) {
        x[i] = normalized(project_perceptual(model, train_items[i].image_ref).values);
        target[i] = (train_items[i].mos - lo) / (hi - lo);
    }

    const std::size_t n_ctx = pv.ctx_pos.size();
    AdamW optimizer(config.per_class ? 2 * n_ctx : n_ctx, config.learning_rate, config.weight_decay);
    std::vector<double> g_pos(n_ctx), g_neg(n_ctx);

    const std::uint64_t shuffle_seed = rng::stream_seed(config.seed, "coop-shuffle");
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto order = rng::permutation(rng::stream_seed(shuffle_seed, std::to_string(epoch)),
                                            train_items.size());
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const double inv_b = 1.0 / static_cast<double>(end - start);

            const std::vector<double> up = compose(pv.anchor_pos, pv.ctx_pos, m, d);
            const std::vector<double> un = compose(pv.anchor_neg, pv.ctx_neg, m, d);
            const double nup = l2_norm(up);
            const double nun = l2_norm(un);
            std::vector<double> tp = up, tn = un;
            for (double& v : tp) v /= nup;
            for (double& v : tn) v /= nun;

            std::vector<double> d_tp(d, 0.0), d_tn(d, 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const auto& a = x[order[k]];
                const double cp = dot(a, tp);
                const double cn = dot(a, tn);
                const double s = 1.0 / (1.0 + std::exp(cn - cp));
                const double err = s - target[order[k]];
                batch_loss += err * err;
                const double w = 2.0 * err * s * (1.0 - s) * inv_b;
                for (int j = 0; j < d; ++j) {
                    d_tp[j] += w * (a[j] - cp * tp[j]);
                    d_tn[j] -= w * (a[j] - cn * tn[j]);
                }
            }
            batch_loss *= inv_b;
            if (!std::isfinite(batch_loss)) raise(Errc::non_finite, "non-finite coop loss");
            epoch_loss += batch_loss;
            ++n_batches;

            // back through t = u/||u||, then mean over rows.
            auto through_norm = [d](const std::vector<double>& t, double nu, const std::vector<double>& g) {
                double tg = 0.0;
                for (int j = 0; j < d; ++j) tg += t[j] * g[j];
                std::vector<double> du(d);
                for (int j = 0; j < d; ++j) du[j] = (g[j] - t[j] * tg) / nu;
                return du;
            };
            const std::vector<double> dup = through_norm(tp, nup, d_tp);
            const std::vector<double> dun = through_norm(tn, nun, d_tn);

            const double inv_m = 1.0 / m;
            if (config.per_class) {
                for (int r = 0; r < m; ++r)
                    for (int j = 0; j < d; ++j) {
                        g_pos[std::size_t(r) * d + j] = inv_m * dup[j];
                        g_neg[std::size_t(r) * d + j] = inv_m * dun[j];
                    }
                optimizer.step({pv.ctx_pos.data(), pv.ctx_neg.data()}, {g_pos.data(), g_neg.data()},
                               {n_ctx, n_ctx});
            } else {
                for (int r = 0; r < m; ++r)
                    for (int j = 0; j < d; ++j)
                        g_pos[std::size_t(r) * d + j] = inv_m * (dup[j] + dun[j]);
                optimizer.step({pv.ctx_pos.data()}, {g_pos.data()}, {n_ctx});
                pv.ctx_neg = pv.ctx_pos;
            }
        }
        result.epoch_loss.push_back(epoch_loss / n_batches);
    }
    return result;
}

void save_prompt_vector(const PromptVector& pv, const std::string& path) {
    auto blob = [](const std::vector<double>& v) {
        const auto bytes = io::f32_to_le(v);
        return io::base64_encode(bytes.data(), bytes.size());
    };
    const json j{{"format", "DECLIP-PROMPT v1"},
                 {"dim", pv.dim},
                 {"m", pv.m},
                 {"per_class", pv.per_class},
                 {"positive_text", pv.positive_text},
                 {"negative_text", pv.negative_text},
                 {"ctx_pos", blob(pv.ctx_pos)},
                 {"ctx_neg", blob(pv.ctx_neg)},
                 {"anchor_pos", blob(pv.anchor_pos)},
                 {"anchor_neg", blob(pv.anchor_neg)}};
    io::write_file(path, j.dump(2) + "\n");
}

PromptVector load_prompt_vector(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        raise(Errc::corrupt_blob, path + ": " + e.what());
    }
    auto unblob = [&](const char* key, std::size_t expect) {
        const auto bytes = io::base64_decode(j.at(key).get<std::string>());
        auto v = io::le_to_f64(bytes.data(), bytes.size());
        if (v.size() != expect) raise(Errc::dimension_mismatch, path + ": bad blob size for " + key);
        return v;
    };
    try {
        if (j.at("format").get<std::string>() != "DECLIP-PROMPT v1")
            raise(Errc::version_mismatch, path + ": unsupported prompt vector format");
        PromptVector pv;
        pv.dim = j.at("dim").get<int>();
        pv.m = j.at("m").get<int>();
        if (pv.dim < 1 || pv.m < 1) raise(Errc::corrupt_blob, path + ": bad dims");
        pv.per_class = j.at("per_class").get<bool>();
        pv.positive_text = j.at("positive_text").get<std::string>();
        pv.negative_text = j.at("negative_text").get<std::string>();
        pv.ctx_pos = unblob("ctx_pos", std::size_t(pv.m) * pv.dim);
        pv.ctx_neg = unblob("ctx_neg", std::size_t(pv.m) * pv.dim);
        pv.anchor_pos = unblob("anchor_pos", pv.dim);
        pv.anchor_neg = unblob("anchor_neg", pv.dim);
        return pv;
    } catch (const json::exception& e) {
        raise(Errc::corrupt_blob, path + ": prompt vector fields missing: " + e.what());
    }
}

} // namespace declip
