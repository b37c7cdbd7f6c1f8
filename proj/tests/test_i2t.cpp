#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <unistd.h>
#include <fstream>

#include "declip/error.hpp"
#include "declip/i2t.hpp"
#include "declip/io_util.hpp"
#include "declip/relabel.hpp"
#include "declip/rng.hpp"

using namespace declip;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / ("declip_i2t_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

// echo client: returns a canned or computed response
class StubClient : public MllmClient {
public:
    explicit StubClient(std::string response) : response_(std::move(response)) {}
    std::string generate(const std::string&, const std::string&) override { return response_; }

private:
    std::string response_;
};

// reflects the escaped description back inside the perceptual block
class EchoClient : public MllmClient {
public:
    std::string generate(const std::string& prompt, const std::string&) override {
        const std::string open = "<DESCRIPTION>";
        const std::string close = "</DESCRIPTION>";
        const auto a = prompt.find(open) + open.size();
        const auto b = prompt.find(close);
        const std::string inner = prompt.substr(a, b - a);
        return "<PERCEPTUAL>" + inner + "</PERCEPTUAL><SEMANTIC>a scene</SEMANTIC>";
    }
};

} // namespace

TEST_CASE("count_perceptual_terms counts occurrences") {
    const PerceptualVocabulary vocab({"sharp", "blurry", "composition"});
    CHECK(count_perceptual_terms("", vocab) == 0);
    CHECK(count_perceptual_terms("A sharp photo with sharp edges and good composition.", vocab) == 3);
    CHECK(count_perceptual_terms("SHARP! Sharp, sharp...", vocab) == 3);
    // whole-token matching: no hit inside larger words
    CHECK(count_perceptual_terms("sharpness and blurriness", vocab) == 0);
}

TEST_CASE("multi-word vocabulary entries match contiguous token runs") {
    const PerceptualVocabulary vocab({"depth of field"});
    CHECK(count_perceptual_terms("shallow depth of field", vocab) == 1);
    CHECK(count_perceptual_terms("depth of field, depth of field!", vocab) == 2);
    CHECK(count_perceptual_terms("depth of the field", vocab) == 0);
    const PerceptualVocabulary both({"depth of field", "depth"});
    CHECK(count_perceptual_terms("nice depth of field", both) == 2);
}

TEST_CASE("vocabulary normalizes, deduplicates and rejects empties") {
    const PerceptualVocabulary vocab({"Sharp", "sharp", "  BLURRY  "});
    CHECK(vocab.size() == 2);
    CHECK_THROWS_AS(PerceptualVocabulary({"..."}), Error);
    CHECK_THROWS_AS(PerceptualVocabulary({}), Error);
}

TEST_CASE("filter_records keeps >= min_count, preserves order, is idempotent") {
    const PerceptualVocabulary vocab({"sharp"});
    std::vector<RawCaptionRecord> records;
    for (int i = 0; i < 12; ++i) {
        std::string desc = "photo";
        for (int k = 0; k < i; ++k) desc += " sharp";
        records.push_back({"img" + std::to_string(i), desc, Source::other, ImageType::natural});
    }

    const auto kept = filter_records(records, vocab, 7);
    REQUIRE(kept.size() == 5); // counts 7..11
    CHECK(kept.front().image_ref == "img7");
    CHECK(kept.back().image_ref == "img11");
    for (const auto& r : kept) CHECK(count_perceptual_terms(r.human_description, vocab) >= 7);

    CHECK(filter_records(kept, vocab, 7) == kept); // idempotent
    CHECK(filter_records(records, vocab, 0) == records);
    CHECK(records.size() == 12); // input untouched

    // independent recount oracle over a randomized corpus
    std::vector<RawCaptionRecord> random_records;
    for (int i = 0; i < 10; ++i) {
        std::string desc;
        const int n = static_cast<int>(rng::at(3, i) % 12);
        for (int k = 0; k < n; ++k) desc += (rng::at(4, i * 16 + k) % 3 == 0) ? "sharp " : "word ";
        random_records.push_back({"r" + std::to_string(i), desc.empty() ? "x" : desc, Source::other,
                                  ImageType::natural});
    }
    const auto filtered = filter_records(random_records, vocab, 2);
    std::vector<RawCaptionRecord> expected;
    for (const auto& r : random_records) {
        int c = 0;
        std::istringstream ss(r.human_description);
        std::string w;
        while (ss >> w)
            if (w == "sharp") ++c;
        if (c >= 2) expected.push_back(r);
    }
    CHECK(filtered == expected);
}

TEST_CASE("dataset JSONL round-trips exactly") {
    const auto dir = temp_dir();
    const auto path = (dir / "data.jsonl").string();
    std::vector<I2TRecord> records = {
        {"a.png", "soft light", "a dog", Source::ava_comments, ImageType::natural},
        {"b.png", "grainy \"noise\"", "café ☕ scène", Source::q_instruct, ImageType::aigc},
        {"c.png", "line\nbreaks\tand\\slashes", "emoji 🎨", Source::synthetic, ImageType::art},
    };
    save_dataset(records, path);
    CHECK(load_dataset(path) == records);
    fs::remove_all(dir);
}

TEST_CASE("randomized unicode records survive the round-trip") {
    const auto dir = temp_dir();
    const auto path = (dir / "fuzz.jsonl").string();
    const std::vector<std::string> pool = {"a", "Z", "9", " ", "\n", "\t", "\"", "\\", "é", "漢", "🎨", "&",
                                           "<", ">", "{", "}"};
    std::vector<I2TRecord> records;
    for (int i = 0; i < 1000; ++i) {
        auto field = [&](std::uint64_t stream) {
            std::string s;
            const int len = 1 + static_cast<int>(rng::at(stream, 2 * i) % 24);
            for (int k = 0; k < len; ++k) s += pool[rng::at(stream, i * 64 + k) % pool.size()];
            return s;
        };
        records.push_back({"img_" + std::to_string(i), field(11), field(12),
                           static_cast<Source>(rng::at(13, i) % 6),
                           static_cast<ImageType>(rng::at(14, i) % 3)});
    }
    save_dataset(records, path);
    CHECK(load_dataset(path) == records);
    fs::remove_all(dir);
}

TEST_CASE("corrupt JSONL line is reported with its line number") {
    const auto dir = temp_dir();
    const auto path = (dir / "broken.jsonl").string();
    io::write_file(path,
                   R"({"image_ref":"a","t_p":"x","t_s":"y","source":"other","image_type":"natural"})"
                   "\nnot json at all\n");
    try {
        load_dataset(path);
        FAIL("expected malformed-line");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_line);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("duplicate image_ref is rejected on load and save") {
    const auto dir = temp_dir();
    const auto path = (dir / "dup.jsonl").string();
    const std::string line =
        R"({"image_ref":"a","t_p":"x","t_s":"y","source":"other","image_type":"natural"})";
    io::write_file(path, line + "\n" + line + "\n");
    CHECK_THROWS_AS(load_dataset(path), Error);

    std::vector<I2TRecord> records = {{"a", "x", "y", Source::other, ImageType::natural},
                                      {"a", "x2", "y2", Source::other, ImageType::natural}};
    CHECK_THROWS_AS(save_dataset(records, (dir / "dup2.jsonl").string()), Error);
    fs::remove_all(dir);
}

TEST_CASE("build_relabel_prompt embeds the description once with unique markers") {
    RawCaptionRecord rec{"img.png", "a moody photo with heavy vignetting", Source::aes_expert,
                         ImageType::natural};
    const std::string prompt = build_relabel_prompt(rec);

    auto count = [&](const std::string& needle) {
        std::size_t n = 0, pos = 0;
        while ((pos = prompt.find(needle, pos)) != std::string::npos) {
            ++n;
            pos += needle.size();
        }
        return n;
    };
    CHECK(count(rec.human_description) == 1);
    CHECK(count("<PERCEPTUAL>") == 1);
    CHECK(count("</PERCEPTUAL>") == 1);
    CHECK(count("<SEMANTIC>") == 1);
    CHECK(count("</SEMANTIC>") == 1);
}

TEST_CASE("marker-bearing descriptions are escaped and recovered intact") {
    const std::string tricky = "weird <PERCEPTUAL> caption & </SEMANTIC> with &lt; literals";
    RawCaptionRecord rec{"img.png", tricky, Source::other, ImageType::natural};

    const std::string prompt = build_relabel_prompt(rec);
    // escaping keeps the response markers unique inside the prompt body
    auto count = [&](const std::string& needle) {
        std::size_t n = 0, pos = 0;
        while ((pos = prompt.find(needle, pos)) != std::string::npos) {
            ++n;
            pos += needle.size();
        }
        return n;
    };
    CHECK(count("<PERCEPTUAL>") == 1);
    CHECK(count("</SEMANTIC>") == 1);
    CHECK(unescape_markup(escape_markup(tricky)) == tricky);

    // an echo stub reflecting the escaped description round-trips it
    EchoClient echo;
    const I2TRecord out = relabel_record(echo, rec);
    CHECK(out.t_p == tricky);
    CHECK(out.t_s == "a scene");
}

TEST_CASE("parse_relabel_response handles the stub and the negative cases") {
    const auto ok = parse_relabel_response(
        "<PERCEPTUAL>soft light</PERCEPTUAL><SEMANTIC>a dog</SEMANTIC>");
    CHECK(ok.t_p == "soft light");
    CHECK(ok.t_s == "a dog");

    auto code_of = [](const std::string& response) {
        try {
            parse_relabel_response(response);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::invalid_argument;
    };
    CHECK(code_of("<PERCEPTUAL>x</PERCEPTUAL><SEMANTIC>y") == Errc::malformed_response);
    CHECK(code_of("<PERCEPTUAL>x</PERCEPTUAL>") == Errc::malformed_response);
    CHECK(code_of("<PERCEPTUAL>a</PERCEPTUAL><PERCEPTUAL>b</PERCEPTUAL><SEMANTIC>y</SEMANTIC>") ==
          Errc::malformed_response);
    CHECK(code_of("<SEMANTIC>y</SEMANTIC><PERCEPTUAL>x</PERCEPTUAL>") == Errc::malformed_response);
    CHECK(code_of("<PERCEPTUAL>  </PERCEPTUAL><SEMANTIC>y</SEMANTIC>") == Errc::empty_field);
}

TEST_CASE("relabel_record round-trips through a stub client") {
    StubClient stub("<PERCEPTUAL>soft light</PERCEPTUAL><SEMANTIC>a dog</SEMANTIC>");
    RawCaptionRecord rec{"img_1", "desc", Source::share_gpt4v, ImageType::art};
    const I2TRecord out = relabel_record(stub, rec);
    CHECK(out.image_ref == "img_1");
    CHECK(out.t_p == "soft light");
    CHECK(out.t_s == "a dog");
    CHECK(out.source == Source::share_gpt4v);
    CHECK(out.image_type == ImageType::art);
}

TEST_CASE("relabel_records routes malformed responses to the rejects file") {
    const auto dir = temp_dir();
    const auto rejects = (dir / "rejects.jsonl").string();

    class FlakyClient : public MllmClient {
    public:
        std::string generate(const std::string&, const std::string& image_ref) override {
            if (image_ref == "bad") return "<PERCEPTUAL>x</PERCEPTUAL>"; // missing semantic block
            return "<PERCEPTUAL>p</PERCEPTUAL><SEMANTIC>s</SEMANTIC>";
        }
    };
    FlakyClient client;
    std::vector<RawCaptionRecord> records = {{"ok1", "d", Source::other, ImageType::natural},
                                             {"bad", "d", Source::other, ImageType::natural},
                                             {"ok2", "d", Source::other, ImageType::natural}};
    std::vector<I2TRecord> out;
    const auto stats = relabel_records(client, records, out, rejects, 1);
    CHECK(stats.relabeled == 2);
    CHECK(stats.rejected == 1);
    REQUIRE(out.size() == 2);
    CHECK(out[0].image_ref == "ok1");
    CHECK(out[1].image_ref == "ok2");

    const std::string reject_text = io::read_file(rejects);
    CHECK(reject_text.find("\"bad\"") != std::string::npos);
    CHECK(reject_text.find("raw_response") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("vocabulary file loader skips comments and blanks") {
    const auto dir = temp_dir();
    const auto path = (dir / "vocab.txt").string();
    io::write_file(path, "# starter terms\nsharp\n\nBlurry\ndepth of field\n");
    const auto vocab = load_vocabulary(path);
    CHECK(vocab.size() == 3);
    CHECK(count_perceptual_terms("sharp blurry depth of field", vocab) == 3);
    fs::remove_all(dir);
}
