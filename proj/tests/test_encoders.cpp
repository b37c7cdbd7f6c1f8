#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <unistd.h>
#include <map>

#include "declip/encoders.hpp"
#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"
#include "declip/text_util.hpp"
#include "oracles.hpp"

using namespace declip;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / ("declip_enc_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("all-zero gray image encodes to one deterministic unit vector") {
    ToyEncoder enc(64, 17);
    const Image img = make_image(8, 8, 0);
    const EmbeddingVector a = enc.encode_image_pixels(img);
    const EmbeddingVector b = enc.encode_image_pixels(img);
    CHECK(a.values == b.values); // bitwise
    CHECK(a.dim() == 64);
    CHECK(std::fabs(l2_norm(a.values) - 1.0) <= 1e-6);
}

TEST_CASE("images differing in one pixel encode to distinct unit vectors") {
    ToyEncoder enc(64, 17);
    Image img1 = make_image(24, 24, 90);
    Image img2 = img1;
    img2.rgb[3 * (5 * 24 + 7)] = 200;
    const auto a = enc.encode_image_pixels(img1);
    const auto b = enc.encode_image_pixels(img2);
    CHECK(a.values != b.values);
    CHECK(std::fabs(l2_norm(a.values) - 1.0) <= 1e-6);
    CHECK(std::fabs(l2_norm(b.values) - 1.0) <= 1e-6);
}

TEST_CASE("toy text encoder: distinct prompts, deterministic repeats") {
    ToyEncoder enc(64, 17);
    const auto good = enc.encode_text("Good photo.");
    const auto bad = enc.encode_text("Bad photo.");
    CHECK(good.values != bad.values);
    CHECK(std::fabs(l2_norm(good.values) - 1.0) <= 1e-6);
    CHECK(std::fabs(l2_norm(bad.values) - 1.0) <= 1e-6);
    CHECK(enc.encode_text("Good photo.").values == good.values);
}

TEST_CASE("toy text encoder is order-invariant (bag of words)") {
    // brute-force the hashed token-count vectors for both orders
    const auto count_vector = [](const std::string& s) {
        std::map<std::uint64_t, int> bins;
        for (const auto& tok : text::tokenize(s)) ++bins[rng::fnv1a64(tok) % 4096];
        return bins;
    };
    CHECK(count_vector("a b") == count_vector("b a"));

    ToyEncoder enc(64, 17);
    CHECK(enc.encode_text("a b").values == enc.encode_text("b a").values);
    CHECK(enc.encode_text("sharp blurry photo").values ==
          enc.encode_text("photo blurry sharp").values);
}

TEST_CASE("empty text is rejected, token-free text still encodes") {
    ToyEncoder enc(32, 17);
    CHECK_THROWS_AS(enc.encode_text("   \t\n"), Error);
    const auto v = enc.encode_text("!!!"); // normalizes to zero tokens; bias carries it
    CHECK(std::fabs(l2_norm(v.values) - 1.0) <= 1e-6);
}

TEST_CASE("encoder outputs are unit-norm for random inputs") {
    ToyEncoder enc(48, 5);
    for (int t = 0; t < 20; ++t) {
        Image img = make_image(17, 13);
        for (std::size_t i = 0; i < img.rgb.size(); ++i)
            img.rgb[i] = static_cast<std::uint8_t>(rng::at(t, i) % 256);
        CHECK(std::fabs(l2_norm(enc.encode_image_pixels(img).values) - 1.0) <= 1e-6);
        CHECK(std::fabs(l2_norm(enc.encode_text("text " + std::to_string(t)).values) - 1.0) <= 1e-6);
    }
}

TEST_CASE("toy encoder reads PPM files through the image_root") {
    const auto dir = temp_dir();
    Image img = make_image(12, 12, 64);
    img.rgb[0] = 255;
    save_ppm(img, (dir / "probe.ppm").string());

    ToyEncoder rooted(64, 17, dir.string());
    ToyEncoder bare(64, 17);
    CHECK(rooted.encode_image("probe.ppm").values == bare.encode_image_pixels(img).values);
    CHECK_THROWS_AS(rooted.encode_image("missing.ppm"), Error);
    fs::remove_all(dir);
}

TEST_CASE("store backend: passthrough with normalization, read-only lookups") {
    std::map<std::string, std::vector<double>> entries;
    entries["img_001"] = {3.0, 0.0, 4.0, 0.0};
    StoreBackend store(4, entries, "test-store");

    const auto v = store.encode_image("img_001");
    CHECK(v.values[0] == doctest::Approx(0.6).epsilon(1e-7));
    CHECK(v.values[2] == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(std::fabs(l2_norm(v.values) - 1.0) <= 1e-6);
    // lookups never mutate: same answer again, and text lookups share the table
    CHECK(store.encode_image("img_001").values == v.values);
    CHECK(store.encode_text("img_001").values == v.values);

    CHECK_THROWS_AS(store.encode_image("nope"), Error);
    try {
        store.encode_image("nope");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_key);
    }
}

TEST_CASE("embedding store file round-trips and rejects damage") {
    const auto dir = temp_dir();
    const auto path = (dir / "store.emb").string();

    std::map<std::string, std::vector<double>> entries;
    for (int i = 0; i < 5; ++i) {
        std::vector<double> v(8);
        for (int k = 0; k < 8; ++k) v[k] = io::snap_f32(rng::uniform01(rng::at(i, k)) - 0.5);
        entries["key_" + std::to_string(i)] = v;
    }
    save_embedding_store(path, 8, entries);
    const auto loaded = load_embedding_store(path);
    CHECK(loaded->dim() == 8);
    CHECK(loaded->size() == 5);
    // raw rows round-trip bitwise; queries add only normalization
    for (const auto& [key, v] : entries) {
        const auto q = loaded->encode_image(key).values;
        const auto expect = normalized(v);
        for (int k = 0; k < 8; ++k) CHECK(q[k] == doctest::Approx(expect[k]).epsilon(1e-7));
    }

    SUBCASE("row of the wrong dimension is rejected") {
        std::string text = io::read_file(path);
        const auto blob = io::f32_to_le({1.0, 2.0});
        text += "short\t" + io::base64_encode(blob.data(), blob.size()) + "\n";
        // fix the count so the length check fires, not the count check
        text.replace(text.find("count=5"), 7, "count=6");
        io::write_file(path, text);
        CHECK_THROWS_AS(load_embedding_store(path), Error);
    }
    SUBCASE("wrong record count is rejected") {
        std::string text = io::read_file(path);
        text.replace(text.find("count=5"), 7, "count=9");
        io::write_file(path, text);
        CHECK_THROWS_AS(load_embedding_store(path), Error);
    }
    SUBCASE("foreign header is rejected") {
        io::write_file(path, "NOT-AN-EMB v9\n");
        CHECK_THROWS_AS(load_embedding_store(path), Error);
    }
    fs::remove_all(dir);
}

TEST_CASE("backend metadata reports kind and dim") {
    ToyEncoder enc(64, 17);
    CHECK(enc.metadata().kind == BackendKind::toy_deterministic);
    CHECK(enc.metadata().dim == 64);
    CHECK(enc.metadata().seed == 17);
    CHECK(to_string(enc.metadata().kind) == "toy-deterministic");
}
