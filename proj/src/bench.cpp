#include "declip/bench.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"

namespace declip {

namespace {

constexpr int kCanvas = 64;

const std::vector<std::string> kSharpWords = {"sharp", "crisp", "clear", "detailed"};
const std::vector<std::string> kBlurWords = {"blurry", "soft", "hazy", "smeared"};

struct ShapeSpec {
    const char* name;
    const char* t_s;
};

const ShapeSpec kShapes[] = {
    {"disk", "a photo of a disk, a single round circle object on a plain background"},
    {"square", "a photo of a square, a single boxy rectangle object on a plain background"},
    {"triangle", "a photo of a triangle, a single three sided wedge object on a plain background"},
    {"cross", "a photo of a cross, a single plus sign object on a plain background"},
    {"ring", "a photo of a ring, a single hollow circular loop object on a plain background"},
    {"diamond", "a photo of a diamond, a single rotated rhombus object on a plain background"},
};
constexpr int kMaxShapes = static_cast<int>(sizeof(kShapes) / sizeof(kShapes[0]));

std::string perceptual_text(int level, int n_levels) {
    const double q = n_levels > 1 ? static_cast<double>(level) / (n_levels - 1) : 0.0;
    const int n_grade = static_cast<int>(kSharpWords.size());
    const int blur_count = static_cast<int>(std::lround(q * n_grade));
    const int sharp_count = n_grade - blur_count;
    std::string words;
    for (int i = 0; i < sharp_count; ++i) words += kSharpWords[i] + " ";
    for (int i = 0; i < blur_count; ++i) words += kBlurWords[i] + " ";
    return "a " + words + "photo, " + (q <= 0.5 ? "good quality" : "bad quality");
}

bool inside_shape(int shape, double dx, double dy, double half) {
    switch (shape) {
        case 0: return dx * dx + dy * dy <= half * half;                      // disk
        case 1: return std::fabs(dx) <= half && std::fabs(dy) <= half;        // square
        case 2: return dy >= -half && dy <= half && std::fabs(dx) <= (dy + half) * 0.5; // triangle
        case 3: return (std::fabs(dx) <= half * 0.3 && std::fabs(dy) <= half) ||
                       (std::fabs(dy) <= half * 0.3 && std::fabs(dx) <= half); // cross
        case 4: {                                                             // ring
            const double r2 = dx * dx + dy * dy;
            return r2 <= half * half && r2 >= (half * 0.55) * (half * 0.55);
        }
        case 5: return std::fabs(dx) + std::fabs(dy) <= half;                 // diamond
    }
    return false;
}

} // namespace

const std::vector<std::string>& perceptual_factor_words() {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> w = kSharpWords;
        w.insert(w.end(), kBlurWords.begin(), kBlurWords.end());
        w.push_back("good");
        w.push_back("bad");
        w.push_back("quality");
        return w;
    }();
    return words;
}

const std::vector<std::string>& semantic_factor_words() {
    static const std::vector<std::string> words = {
        "disk", "circle", "round",  "square",  "boxy", "rectangle", "triangle", "wedge",
        "cross", "plus",  "ring",   "hollow",  "loop", "circular",  "diamond",  "rhombus"};
    return words;
}

SyntheticBenchmark make_synthetic_benchmark(std::uint64_t seed, int n_items, int n_perc_factors,
                                            int n_sem_factors) {
    if (n_items < 2 || n_perc_factors < 2 || n_sem_factors < 2)
        raise(Errc::invalid_argument, "benchmark needs n_items, n_perc, n_sem all >= 2");
    if (n_sem_factors > kMaxShapes)
        raise(Errc::invalid_argument, "at most " + std::to_string(kMaxShapes) + " shape classes available");

    SyntheticBenchmark bench;
    bench.n_perc = n_perc_factors;
    bench.n_sem = n_sem_factors;

    for (int i = 0; i < n_items; ++i) {
        const int perc = i % n_perc_factors;
        const int sem = (i / n_perc_factors) % n_sem_factors;
        const std::uint64_t item_seed = rng::stream_seed(seed, "item-" + std::to_string(i));

        const double background = rng::uniform_range(item_seed, 0, 0.15, 0.35);
        const double foreground = rng::uniform_range(item_seed, 1, 0.75, 0.95);
        const double cx = kCanvas / 2.0 + rng::uniform_range(item_seed, 2, -6.0, 6.0);
        const double cy = kCanvas / 2.0 + rng::uniform_range(item_seed, 3, -6.0, 6.0);
        const double half = rng::uniform_range(item_seed, 4, 10.0, 16.0);
        const double tint[3] = {rng::uniform_range(item_seed, 5, 0.9, 1.1),
                                rng::uniform_range(item_seed, 6, 0.9, 1.1),
                                rng::uniform_range(item_seed, 7, 0.9, 1.1)};

        Image img = make_image(kCanvas, kCanvas);
        std::uint64_t noise_counter = 16;
        for (int y = 0; y < kCanvas; ++y) {
            for (int x = 0; x < kCanvas; ++x) {
                const bool fg = inside_shape(sem, x + 0.5 - cx, y + 0.5 - cy, half);
                const double noise = rng::uniform_range(item_seed, noise_counter++, -0.02, 0.02);
                const double base = (fg ? foreground : background) + noise;
                for (int c = 0; c < 3; ++c) {
                    double v = std::floor(base * tint[c] * 255.0 + 0.5);
                    if (v < 0) v = 0;
                    if (v > 255) v = 255;
                    img.rgb[3 * (std::size_t(y) * kCanvas + x) + c] = static_cast<std::uint8_t>(v);
                }
            }
        }
        box_blur_in_place(img, 2, perc);

        char ref[48];
        std::snprintf(ref, sizeof(ref), "images/item_%05d.ppm", i);
        bench.images.push_back(std::move(img));
        bench.records.push_back(I2TRecord{ref, perceptual_text(perc, n_perc_factors),
                                          kShapes[sem].t_s, Source::synthetic, ImageType::aigc});
        bench.truth.push_back(BenchItem{ref, perc, sem});
    }
    return bench;
}

std::vector<MosItem> benchmark_mos_items(const SyntheticBenchmark& bench) {
    std::vector<MosItem> items;
    items.reserve(bench.truth.size());
    for (const auto& t : bench.truth) {
        const double mos = static_cast<double>(bench.n_perc - 1 - t.perc);
        items.push_back(MosItem{t.image_ref, mos, {{"sharpness", mos}}});
    }
    return items;
}

void write_benchmark(const SyntheticBenchmark& bench, const std::string& out_dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "images");
    for (std::size_t i = 0; i < bench.images.size(); ++i)
        save_ppm(bench.images[i], (fs::path(out_dir) / bench.truth[i].image_ref).string());
    save_dataset(bench.records, (fs::path(out_dir) / "dataset.jsonl").string());

    std::string factors = "image_ref,perc_idx,sem_idx\n";
    for (const auto& t : bench.truth)
        factors += t.image_ref + "," + std::to_string(t.perc) + "," + std::to_string(t.sem) + "\n";
    io::write_file((fs::path(out_dir) / "factors.csv").string(), factors);

    save_mos_csv(benchmark_mos_items(bench), (fs::path(out_dir) / "mos.csv").string());

    const nlohmann::json meta{{"seed", seed},
                              {"n_items", bench.records.size()},
                              {"n_perc_factors", bench.n_perc},
                              {"n_sem_factors", bench.n_sem}};
    io::write_file((fs::path(out_dir) / "meta.json").string(), meta.dump(2) + "\n");
}

} // namespace declip
