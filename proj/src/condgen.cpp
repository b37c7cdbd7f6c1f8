#include "declip/condgen.hpp"

#include <json.hpp>

#include "declip/error.hpp"
#include "declip/io_util.hpp"

namespace declip {

using nlohmann::json;

std::string to_string(ConditionMode mode) {
    return mode == ConditionMode::perceptual_image_semantic_text ? "perceptual_image_semantic_text"
                                                                 : "semantic_image_perceptual_text";
}

ConditionMode condition_mode_from_string(const std::string& s) {
    if (s == "perceptual_image_semantic_text") return ConditionMode::perceptual_image_semantic_text;
    if (s == "semantic_image_perceptual_text") return ConditionMode::semantic_image_perceptual_text;
    raise(Errc::invalid_mode, "unknown condition mode: " + s);
}

void validate_bundle(const ConditionBundle& bundle) {
    const bool perceptual_image = bundle.mode == ConditionMode::perceptual_image_semantic_text;
    const std::string expected = perceptual_image ? "perceptual" : "semantic";
    if (bundle.image_projection != expected)
        raise(Errc::invalid_mode, "mode " + to_string(bundle.mode) + " requires a " + expected +
                                      " image projection, bundle carries '" + bundle.image_projection + "'");
    if (bundle.image_embedding.empty() || bundle.image_embedding.size() != bundle.text_embedding.size())
        raise(Errc::dimension_mismatch, "condition embeddings must share a positive dimension");
    if (!all_finite(bundle.image_embedding) || !all_finite(bundle.text_embedding))
        raise(Errc::non_finite, "condition embeddings must be finite");
    if (bundle.text.empty()) raise(Errc::empty_text, "condition bundle carries empty text");
}

ConditionBundle assemble_condition(const DeclipModel& model, ConditionMode mode,
                                   const std::string& image_ref, const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        raise(Errc::empty_text, "assemble_condition: empty text");
    ConditionBundle b;
    b.mode = mode;
    const bool perceptual_image = mode == ConditionMode::perceptual_image_semantic_text;
    b.image_embedding = perceptual_image ? project_perceptual(model, image_ref).values
                                         : project_semantic(model, image_ref).values;
    b.text_embedding = model.encoder->encode_text(text).values;
    io::snap_f32(b.image_embedding);
    io::snap_f32(b.text_embedding);
    b.image_ref = image_ref;
    b.text = text;
    b.checkpoint_id = io::hex64(param_checksum(model));
    b.image_projection = perceptual_image ? "perceptual" : "semantic";
    validate_bundle(b);
    return b;
}

void export_condition(const ConditionBundle& bundle, const std::string& path) {
    validate_bundle(bundle);
    const json meta{{"mode", to_string(bundle.mode)},
                    {"dim", bundle.image_embedding.size()},
                    {"image_ref", bundle.image_ref},
                    {"text", bundle.text},
                    {"checkpoint_id", bundle.checkpoint_id},
                    {"image_projection", bundle.image_projection}};
    std::string out = "DECLIP-COND v1\n";
    out += meta.dump();
    out += '\n';
    for (double v : bundle.image_embedding) io::append_f32_le(out, static_cast<float>(v));
    for (double v : bundle.text_embedding) io::append_f32_le(out, static_cast<float>(v));
    io::write_file(path, out);
}

ConditionBundle import_condition(const std::string& path) {
    const std::string bytes = io::read_file(path);
    const std::size_t nl1 = bytes.find('\n');
    if (nl1 == std::string::npos) raise(Errc::corrupt_blob, "condition file has no header: " + path);
    const std::string header = bytes.substr(0, nl1);
    if (header != "DECLIP-COND v1") {
        if (header.rfind("DECLIP-COND", 0) == 0)
            raise(Errc::version_mismatch, "unsupported condition file version: " + header);
        raise(Errc::version_mismatch, "not a DECLIP-COND file: " + path);
    }
    const std::size_t nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string::npos) raise(Errc::corrupt_blob, "condition file has no metadata: " + path);

    ConditionBundle b;
    std::size_t dim = 0;
    try {
        const json meta = json::parse(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
        b.mode = condition_mode_from_string(meta.at("mode").get<std::string>());
        dim = meta.at("dim").get<std::size_t>();
        b.image_ref = meta.at("image_ref").get<std::string>();
        b.text = meta.at("text").get<std::string>();
        b.checkpoint_id = meta.at("checkpoint_id").get<std::string>();
        b.image_projection = meta.at("image_projection").get<std::string>();
    } catch (const json::exception& e) {
        raise(Errc::corrupt_blob, path + ": bad condition metadata: " + e.what());
    }
    if (dim == 0) raise(Errc::corrupt_blob, path + ": zero dimension");

    const std::size_t need = dim * 4 * 2;
    if (bytes.size() - nl2 - 1 != need)
        raise(Errc::corrupt_blob, path + ": blob size mismatch (" + std::to_string(bytes.size() - nl2 - 1) +
                                      " bytes, expected " + std::to_string(need) + ")");
    const auto* blob = reinterpret_cast<const std::uint8_t*>(bytes.data() + nl2 + 1);
    b.image_embedding = io::le_to_f64(blob, dim * 4);
    b.text_embedding = io::le_to_f64(blob + dim * 4, dim * 4);
    validate_bundle(b);
    return b;
}

} // namespace declip
