#include "declip/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"
#include "declip/text_util.hpp"

namespace declip {

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::precomputed_store: return "precomputed-store";
        case BackendKind::toy_deterministic: return "toy-deterministic";
        case BackendKind::remote_service: return "remote-service";
    }
    return "?";
}

namespace {

std::vector<double> gaussian_matrix(std::uint64_t seed, std::string_view stream, std::size_t rows,
                                    std::size_t cols) {
    const std::uint64_t s = rng::stream_seed(seed, stream);
    std::vector<double> m(rows * cols);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng::gaussian(s, i);
    return m;
}

// e = x^T M for row-major M (features x dim).
std::vector<double> project(const std::vector<double>& features, const std::vector<double>& matrix,
                            int dim) {
    std::vector<double> out(dim, 0.0);
    const std::size_t rows = features.size();
    for (std::size_t r = 0; r < rows; ++r) {
        const double x = features[r];
        if (x == 0.0) continue;
        const double* row = matrix.data() + r * dim;
        for (int d = 0; d < dim; ++d) out[d] += x * row[d];
    }
    return out;
}

EmbeddingVector finish_embedding(std::vector<double> v) {
    normalize_in_place(v);
    io::snap_f32(v);
    return EmbeddingVector{std::move(v), true};
}

} // namespace

ToyEncoder::ToyEncoder(int dim, std::uint64_t seed, std::string image_root)
    : EncoderBackend(BackendMetadata{BackendKind::toy_deterministic, dim,
                                     "toy-deterministic v1 seed=" + std::to_string(seed), seed}),
      image_root_(std::move(image_root)),
      text_proj_(gaussian_matrix(seed, "text-proj", kTextBins + 1, dim)),
      image_proj_(gaussian_matrix(seed, "image-proj", kImageFeatures, dim)) {
    if (dim < 1) raise(Errc::invalid_argument, "toy encoder dim must be positive");
}

EmbeddingVector ToyEncoder::encode_text(const std::string& text) const {
    if (text::trim(text).empty()) raise(Errc::empty_text, "encode_text: empty text");
    std::vector<double> counts(kTextBins + 1, 0.0);
    for (const std::string& tok : text::tokenize(text)) counts[rng::fnv1a64(tok) % kTextBins] += 1.0;
    counts[kTextBins] = 1.0; // constant component, keeps token-free strings encodable
    return finish_embedding(project(counts, text_proj_, dim()));
}

std::vector<double> ToyEncoder::image_features(const Image& img) {
    if (img.empty()) raise(Errc::invalid_argument, "cannot encode empty image");
    const std::vector<double> luma = luma_plane(img);
    const int w = img.width;
    const int h = img.height;

    std::vector<double> feat;
    feat.reserve(kImageFeatures);

    // 16x16 average pool; cells of tiny images fall back to single pixels.
    for (int cy = 0; cy < kPatchSide; ++cy) {
        int y0 = cy * h / kPatchSide;
        int y1 = std::max(y0 + 1, (cy + 1) * h / kPatchSide);
        y0 = std::min(y0, h - 1);
        y1 = std::min(y1, h);
        for (int cx = 0; cx < kPatchSide; ++cx) {
            int x0 = cx * w / kPatchSide;
            int x1 = std::max(x0 + 1, (cx + 1) * w / kPatchSide);
            x0 = std::min(x0, w - 1);
            x1 = std::min(x1, w);
            double acc = 0.0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) acc += luma[std::size_t(y) * w + x];
            feat.push_back(acc / ((y1 - y0) * (x1 - x0)));
        }
    }

    const double n = static_cast<double>(luma.size());
    double mean = 0.0;
    double lo = 1.0, hi = 0.0;
    for (double v : luma) {
        mean += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    mean /= n;
    double var = 0.0;
    for (double v : luma) var += (v - mean) * (v - mean);
    var /= n;

    // Forward-difference gradient magnitude (zero past the last row/column).
    double grad_mean = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = x + 1 < w ? luma[std::size_t(y) * w + x + 1] - luma[std::size_t(y) * w + x] : 0.0;
            const double gy = y + 1 < h ? luma[std::size_t(y + 1) * w + x] - luma[std::size_t(y) * w + x] : 0.0;
            grad_mean += std::sqrt(gx * gx + gy * gy);
        }
    }
    grad_mean /= n;

    // 4-neighbour Laplacian with replicate edges.
    double lap_mean = 0.0;
    std::vector<double> lap(luma.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double c = luma[std::size_t(y) * w + x];
            const double l = luma[std::size_t(y) * w + std::max(x - 1, 0)];
            const double r = luma[std::size_t(y) * w + std::min(x + 1, w - 1)];
            const double u = luma[std::size_t(std::max(y - 1, 0)) * w + x];
            const double d = luma[std::size_t(std::min(y + 1, h - 1)) * w + x];
            lap[std::size_t(y) * w + x] = l + r + u + d - 4.0 * c;
            lap_mean += lap[std::size_t(y) * w + x];
        }
    }
    lap_mean /= n;
    double lap_var = 0.0;
    for (double v : lap) lap_var += (v - lap_mean) * (v - lap_mean);
    lap_var /= n;

    double rm = 0.0, gm = 0.0, bm = 0.0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        rm += img.rgb[3 * i];
        gm += img.rgb[3 * i + 1];
        bm += img.rgb[3 * i + 2];
    }
    feat.push_back(mean);
    feat.push_back(var);
    feat.push_back(grad_mean);
    feat.push_back(lap_var);
    feat.push_back(rm / (255.0 * n));
    feat.push_back(gm / (255.0 * n));
    feat.push_back(bm / (255.0 * n));
    feat.push_back(hi - lo);
    feat.push_back(1.0); // constant component, keeps flat images encodable
    return feat;
}

EmbeddingVector ToyEncoder::encode_image_pixels(const Image& img) const {
    return finish_embedding(project(image_features(img), image_proj_, dim()));
}

EmbeddingVector ToyEncoder::encode_image(const std::string& image_ref) const {
    namespace fs = std::filesystem;
    fs::path p(image_ref);
    if (!image_root_.empty() && p.is_relative()) p = fs::path(image_root_) / p;
    return encode_image_pixels(load_image(p.string()));
}

StoreBackend::StoreBackend(int dim, std::map<std::string, std::vector<double>> entries,
                           std::string identifier)
    : EncoderBackend(BackendMetadata{BackendKind::precomputed_store, dim, std::move(identifier), 0}),
      entries_(std::move(entries)) {
    for (const auto& [key, v] : entries_) {
        if (static_cast<int>(v.size()) != dim)
            raise(Errc::dimension_mismatch,
                  "store row '" + key + "' has length " + std::to_string(v.size()) + ", expected " +
                      std::to_string(dim));
    }
}

EmbeddingVector StoreBackend::lookup(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) raise(Errc::unknown_key, "key not in embedding store: " + key);
    std::vector<double> v = it->second;
    normalize_in_place(v);
    io::snap_f32(v);
    return EmbeddingVector{std::move(v), true};
}

EmbeddingVector StoreBackend::encode_image(const std::string& image_ref) const { return lookup(image_ref); }
EmbeddingVector StoreBackend::encode_text(const std::string& text) const { return lookup(text); }

std::shared_ptr<StoreBackend> load_embedding_store(const std::string& path) {
    const std::string bytes = io::read_file(path);
    std::istringstream in(bytes);
    std::string header;
    if (!std::getline(in, header)) raise(Errc::corrupt_blob, "empty embedding store: " + path);
    int dim = 0;
    long long count = -1;
    if (std::sscanf(header.c_str(), "DECLIP-EMB v1 dim=%d count=%lld", &dim, &count) != 2) {
        if (header.rfind("DECLIP-EMB", 0) != 0)
            raise(Errc::version_mismatch, "not a DECLIP-EMB file: " + path);
        raise(Errc::version_mismatch, "unsupported embedding store header: " + header);
    }
    if (dim < 1 || count < 0) raise(Errc::corrupt_blob, "bad embedding store header: " + header);

    std::map<std::string, std::vector<double>> entries;
    std::string line;
    long long n = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            raise(Errc::malformed_line, path + ": line " + std::to_string(n + 2) + " has no tab separator");
        const std::string key = line.substr(0, tab);
        const auto blob = io::base64_decode(line.substr(tab + 1));
        if (blob.size() != static_cast<std::size_t>(dim) * 4)
            raise(Errc::dimension_mismatch,
                  path + ": row '" + key + "' holds " + std::to_string(blob.size() / 4) +
                      " floats, expected " + std::to_string(dim));
        if (!entries.emplace(key, io::le_to_f64(blob.data(), blob.size())).second)
            raise(Errc::duplicate_image_ref, path + ": duplicate store key '" + key + "'");
        ++n;
    }
    if (n != count)
        raise(Errc::corrupt_blob, path + ": header promises " + std::to_string(count) + " records, found " +
                                      std::to_string(n));
    return std::make_shared<StoreBackend>(dim, std::move(entries), "precomputed-store v1 " + path);
}

void save_embedding_store(const std::string& path, int dim,
                          const std::map<std::string, std::vector<double>>& entries) {
    std::string out = "DECLIP-EMB v1 dim=" + std::to_string(dim) +
                      " count=" + std::to_string(entries.size()) + "\n";
    for (const auto& [key, v] : entries) {
        if (static_cast<int>(v.size()) != dim)
            raise(Errc::dimension_mismatch, "store entry '" + key + "' does not match dim");
        const auto blob = io::f32_to_le(v);
        out += key;
        out += '\t';
        out += io::base64_encode(blob.data(), blob.size());
        out += '\n';
    }
    io::write_file(path, out);
}

} // namespace declip
