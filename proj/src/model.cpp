#include "declip/model.hpp"

#include <json.hpp>

#include <cmath>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"

namespace declip {

using nlohmann::json;

DeclipModel make_declip_model(std::shared_ptr<const EncoderBackend> encoder, int hidden, double tau,
                              std::uint64_t seed) {
    if (!encoder) raise(Errc::invalid_argument, "model needs an encoder backend");
    if (!(tau > 0.0)) raise(Errc::invalid_argument, "temperature must be positive");
    DeclipModel m;
    m.encoder = std::move(encoder);
    m.proj_p = init_resmlp(m.encoder->dim(), hidden, seed, "proj-perceptual");
    m.proj_s = init_resmlp(m.encoder->dim(), hidden, seed, "proj-semantic");
    m.tau = tau;
    m.init_seed = seed;
    return m;
}

namespace {

EmbeddingVector project_with(const DeclipModel& model, const ResMlpParams& proj,
                             const std::string& image_ref) {
    const EmbeddingVector f = model.encoder->encode_image(image_ref);
    std::vector<double> out = resmlp_forward(proj, f.values, nullptr, model.normalize_projection);
    return EmbeddingVector{std::move(out), model.normalize_projection};
}

} // namespace

EmbeddingVector project_perceptual(const DeclipModel& model, const std::string& image_ref) {
    return project_with(model, model.proj_p, image_ref);
}

EmbeddingVector project_semantic(const DeclipModel& model, const std::string& image_ref) {
    return project_with(model, model.proj_s, image_ref);
}

namespace {

void append_params_f32(std::string& out, const ResMlpParams& p) {
    for (double v : p.w1) io::append_f32_le(out, static_cast<float>(v));
    for (double v : p.b1) io::append_f32_le(out, static_cast<float>(v));
    for (double v : p.w2) io::append_f32_le(out, static_cast<float>(v));
}

} // namespace

std::uint64_t param_checksum(const DeclipModel& model) {
    std::string bytes;
    bytes.reserve((model.proj_p.param_count() + model.proj_s.param_count()) * 4);
    append_params_f32(bytes, model.proj_p);
    append_params_f32(bytes, model.proj_s);
    return rng::fnv1a64(bytes.data(), bytes.size());
}

const std::vector<double>& EmbeddingCache::image(const std::string& ref) {
    auto it = images_.find(ref);
    if (it == images_.end()) it = images_.emplace(ref, backend_->encode_image(ref).values).first;
    return it->second;
}

const std::vector<double>& EmbeddingCache::text(const std::string& text) {
    auto it = texts_.find(text);
    if (it == texts_.end()) it = texts_.emplace(text, backend_->encode_text(text).values).first;
    return it->second;
}

TotalLossResult total_loss(const DeclipModel& model, const std::vector<I2TRecord>& batch,
                           EmbeddingCache& cache, bool with_grads) {
    const int b = static_cast<int>(batch.size());
    if (b < 2) raise(Errc::degenerate_batch, "total_loss needs a batch of >= 2 records");
    const int d = model.dim();

    EmbeddingBatch img_p = make_batch(b, d);
    EmbeddingBatch img_s = make_batch(b, d);
    EmbeddingBatch txt_p = make_batch(b, d);
    EmbeddingBatch txt_s = make_batch(b, d);
    std::vector<ResMlpTrace> traces_p(b), traces_s(b);

    for (int i = 0; i < b; ++i) {
        const std::vector<double>& f = cache.image(batch[i].image_ref);
        const std::vector<double> yp = resmlp_forward(model.proj_p, f, with_grads ? &traces_p[i] : nullptr,
                                                      model.normalize_projection);
        const std::vector<double> ys = resmlp_forward(model.proj_s, f, with_grads ? &traces_s[i] : nullptr,
                                                      model.normalize_projection);
        std::copy(yp.begin(), yp.end(), img_p.row(i));
        std::copy(ys.begin(), ys.end(), img_s.row(i));
        const std::vector<double>& tp = cache.text(batch[i].t_p);
        const std::vector<double>& ts = cache.text(batch[i].t_s);
        std::copy(tp.begin(), tp.end(), txt_p.row(i));
        std::copy(ts.begin(), ts.end(), txt_s.row(i));
    }

    TotalLossResult result;
    EmbeddingBatch d_img_p, d_img_s;
    result.loss_p = contrastive_loss(img_p, txt_p, model.tau, with_grads ? &d_img_p : nullptr, nullptr);
    result.loss_s = contrastive_loss(img_s, txt_s, model.tau, with_grads ? &d_img_s : nullptr, nullptr);
    result.loss = result.loss_p + result.loss_s;

    if (with_grads) {
        result.grads_p.resize_like(model.proj_p);
        result.grads_s.resize_like(model.proj_s);
        std::vector<double> d_out(d);
        for (int i = 0; i < b; ++i) {
            std::copy(d_img_p.row(i), d_img_p.row(i) + d, d_out.begin());
            resmlp_backward(model.proj_p, traces_p[i], d_out, result.grads_p, nullptr);
            std::copy(d_img_s.row(i), d_img_s.row(i) + d, d_out.begin());
            resmlp_backward(model.proj_s, traces_s[i], d_out, result.grads_s, nullptr);
        }
    }
    return result;
}

void save_checkpoint(const DeclipModel& model, const std::string& path) {
    json meta{{"format", 1},
              {"dim", model.dim()},
              {"hidden", model.proj_p.hidden},
              {"tau", model.tau},
              {"seed", model.init_seed},
              {"normalize_projection", model.normalize_projection},
              {"encoder", {{"kind", to_string(model.encoder->metadata().kind)},
                           {"dim", model.encoder->metadata().dim},
                           {"identifier", model.encoder->metadata().identifier},
                           {"seed", model.encoder->metadata().seed}}}};
    std::string out = "DECLIP-CKPT v1\n";
    out += meta.dump();
    out += '\n';
    append_params_f32(out, model.proj_p);
    append_params_f32(out, model.proj_s);
    io::write_file(path, out);
}

namespace {

std::size_t read_params_f32(const std::string& bytes, std::size_t pos, ResMlpParams& p) {
    const std::size_t need = p.param_count() * 4;
    if (bytes.size() - pos < need) raise(Errc::corrupt_blob, "checkpoint parameter blob truncated");
    const auto* u = reinterpret_cast<const std::uint8_t*>(bytes.data() + pos);
    std::vector<double> all = io::le_to_f64(u, need);
    std::size_t k = 0;
    for (double& v : p.w1) v = all[k++];
    for (double& v : p.b1) v = all[k++];
    for (double& v : p.w2) v = all[k++];
    return pos + need;
}

} // namespace

DeclipModel load_checkpoint(const std::string& path, std::shared_ptr<const EncoderBackend> encoder) {
    if (!encoder) raise(Errc::invalid_argument, "load_checkpoint needs an encoder backend");
    const std::string bytes = io::read_file(path);
    const std::size_t nl1 = bytes.find('\n');
    if (nl1 == std::string::npos) raise(Errc::corrupt_blob, "checkpoint has no header line: " + path);
    const std::string header = bytes.substr(0, nl1);
    if (header != "DECLIP-CKPT v1") {
        if (header.rfind("DECLIP-CKPT", 0) == 0)
            raise(Errc::version_mismatch, "unsupported checkpoint version: " + header);
        raise(Errc::version_mismatch, "not a DECLIP-CKPT file: " + path);
    }
    const std::size_t nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string::npos) raise(Errc::corrupt_blob, "checkpoint has no metadata line: " + path);

    json meta;
    try {
        meta = json::parse(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
    } catch (const json::exception& e) {
        raise(Errc::corrupt_blob, std::string("bad checkpoint metadata: ") + e.what());
    }

    DeclipModel m;
    try {
        if (meta.at("format").get<int>() != 1)
            raise(Errc::version_mismatch, "unsupported checkpoint format field");
        const int dim = meta.at("dim").get<int>();
        const int hidden = meta.at("hidden").get<int>();
        if (dim < 1 || hidden < 1) raise(Errc::corrupt_blob, "checkpoint declares non-positive dims");
        if (dim != encoder->dim())
            raise(Errc::dimension_mismatch,
                  "checkpoint dim " + std::to_string(dim) + " does not match encoder dim " +
                      std::to_string(encoder->dim()));
        m.encoder = std::move(encoder);
        m.tau = meta.at("tau").get<double>();
        m.init_seed = meta.at("seed").get<std::uint64_t>();
        m.normalize_projection = meta.at("normalize_projection").get<bool>();
        m.proj_p.dim = m.proj_s.dim = dim;
        m.proj_p.hidden = m.proj_s.hidden = hidden;
    } catch (const json::exception& e) {
        raise(Errc::corrupt_blob, std::string("checkpoint metadata incomplete: ") + e.what());
    }
    m.proj_p.w1.resize(std::size_t(m.proj_p.hidden) * m.proj_p.dim);
    m.proj_p.b1.resize(m.proj_p.hidden);
    m.proj_p.w2.resize(std::size_t(m.proj_p.dim) * m.proj_p.hidden);
    m.proj_s.w1.resize(m.proj_p.w1.size());
    m.proj_s.b1.resize(m.proj_p.b1.size());
    m.proj_s.w2.resize(m.proj_p.w2.size());

    std::size_t pos = nl2 + 1;
    pos = read_params_f32(bytes, pos, m.proj_p);
    pos = read_params_f32(bytes, pos, m.proj_s);
    if (pos != bytes.size()) raise(Errc::corrupt_blob, "trailing bytes after checkpoint blobs");
    if (!all_finite(m.proj_p.w1) || !all_finite(m.proj_p.b1) || !all_finite(m.proj_p.w2) ||
        !all_finite(m.proj_s.w1) || !all_finite(m.proj_s.b1) || !all_finite(m.proj_s.w2))
        raise(Errc::corrupt_blob, "checkpoint holds non-finite parameters");
    return m;
}

CheckpointInfo peek_checkpoint(const std::string& path) {
    const std::string bytes = io::read_file(path);
    const std::size_t nl1 = bytes.find('\n');
    if (nl1 == std::string::npos || bytes.substr(0, nl1) != "DECLIP-CKPT v1")
        raise(Errc::version_mismatch, "not a DECLIP-CKPT v1 file: " + path);
    const std::size_t nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string::npos) raise(Errc::corrupt_blob, "checkpoint has no metadata line: " + path);
    try {
        const json meta = json::parse(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
        CheckpointInfo info;
        info.dim = meta.at("dim").get<int>();
        info.hidden = meta.at("hidden").get<int>();
        info.tau = meta.at("tau").get<double>();
        info.seed = meta.at("seed").get<std::uint64_t>();
        const auto& enc = meta.at("encoder");
        const std::string kind = enc.at("kind").get<std::string>();
        if (kind == "precomputed-store") info.encoder.kind = BackendKind::precomputed_store;
        else if (kind == "toy-deterministic") info.encoder.kind = BackendKind::toy_deterministic;
        else if (kind == "remote-service") info.encoder.kind = BackendKind::remote_service;
        else raise(Errc::corrupt_blob, "unknown encoder kind in checkpoint: " + kind);
        info.encoder.dim = enc.at("dim").get<int>();
        info.encoder.identifier = enc.at("identifier").get<std::string>();
        info.encoder.seed = enc.at("seed").get<std::uint64_t>();
        return info;
    } catch (const json::exception& e) {
        raise(Errc::corrupt_blob, path + ": checkpoint metadata incomplete: " + e.what());
    }
}

std::string checkpoint_id(const std::string& path) { return io::hex64(io::file_hash(path)); }

} // namespace declip
