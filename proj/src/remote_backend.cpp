#include <httplib.h>
#include <json.hpp>

#include "declip/encoders.hpp"
#include "declip/error.hpp"
#include "declip/io_util.hpp"

namespace declip {

RemoteBackend::RemoteBackend(std::string base_url, int dim)
    : EncoderBackend(BackendMetadata{BackendKind::remote_service, dim, "remote-service v1 " + base_url, 0}),
      base_url_(std::move(base_url)) {
    if (dim < 1) raise(Errc::invalid_argument, "remote backend dim must be positive");
}

EmbeddingVector RemoteBackend::request(const std::string& modality, const std::string& payload) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(10, 0);
    client.set_write_timeout(10, 0);

    nlohmann::json body = {{"modality", modality}, {"payload", payload}};
    const auto res = client.Post("/encode", body.dump(), "application/json");
    if (!res) raise(Errc::remote_unavailable, "encode service unreachable: " + base_url_);
    if (res->status != 200)
        raise(Errc::remote_unavailable,
              "encode service returned HTTP " + std::to_string(res->status));

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_response, std::string("bad encode reply: ") + e.what());
    }
    if (!reply.contains("dim") || !reply.contains("values") || !reply["values"].is_array())
        raise(Errc::malformed_response, "encode reply missing dim/values");
    if (reply["dim"].get<int>() != dim() || static_cast<int>(reply["values"].size()) != dim())
        raise(Errc::dimension_mismatch, "encode reply dimension does not match backend");

    std::vector<double> v;
    v.reserve(dim());
    for (const auto& x : reply["values"]) v.push_back(x.get<double>());
    if (!all_finite(v)) raise(Errc::non_finite, "encode reply holds non-finite values");
    normalize_in_place(v);
    io::snap_f32(v);
    return EmbeddingVector{std::move(v), true};
}

EmbeddingVector RemoteBackend::encode_image(const std::string& image_ref) const {
    return request("image", image_ref);
}

EmbeddingVector RemoteBackend::encode_text(const std::string& text) const {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        raise(Errc::empty_text, "encode_text: empty text");
    return request("text", text);
}

} // namespace declip
