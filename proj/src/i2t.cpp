#include "declip/i2t.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/text_util.hpp"

namespace declip {

using nlohmann::json;

std::string to_string(Source s) {
    switch (s) {
        case Source::aes_expert: return "AesExpert";
        case Source::q_instruct: return "Q-Instruct";
        case Source::share_gpt4v: return "ShareGPT4v";
        case Source::ava_comments: return "AVA-Comments";
        case Source::synthetic: return "synthetic";
        case Source::other: return "other";
    }
    return "other";
}

std::string to_string(ImageType t) {
    switch (t) {
        case ImageType::natural: return "natural";
        case ImageType::art: return "art";
        case ImageType::aigc: return "aigc";
    }
    return "natural";
}

Source source_from_string(const std::string& s) {
    if (s == "AesExpert") return Source::aes_expert;
    if (s == "Q-Instruct") return Source::q_instruct;
    if (s == "ShareGPT4v") return Source::share_gpt4v;
    if (s == "AVA-Comments") return Source::ava_comments;
    if (s == "synthetic") return Source::synthetic;
    if (s == "other") return Source::other;
    raise(Errc::invalid_argument, "unknown source: " + s);
}

ImageType image_type_from_string(const std::string& s) {
    if (s == "natural") return ImageType::natural;
    if (s == "art") return ImageType::art;
    if (s == "aigc") return ImageType::aigc;
    raise(Errc::invalid_argument, "unknown image_type: " + s);
}

PerceptualVocabulary::PerceptualVocabulary(const std::vector<std::string>& terms) {
    std::unordered_set<std::string> seen;
    for (const std::string& raw : terms) {
        const auto tokens = text::tokenize(raw);
        if (tokens.empty()) raise(Errc::invalid_argument, "vocabulary term normalizes to nothing: '" + raw + "'");
        std::string canonical;
        for (const auto& t : tokens) {
            if (!canonical.empty()) canonical.push_back(' ');
            canonical += t;
        }
        if (!seen.insert(canonical).second) continue;
        if (tokens.size() == 1) {
            singles_.insert(tokens[0]);
        } else {
            phrases_.push_back(tokens);
        }
        ++n_terms_;
    }
    if (n_terms_ == 0) raise(Errc::invalid_argument, "vocabulary is empty");
}

PerceptualVocabulary load_vocabulary(const std::string& path) {
    std::istringstream in(io::read_file(path));
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        terms.push_back(t);
    }
    return PerceptualVocabulary(terms);
}

int count_perceptual_terms(const std::string& text_in, const PerceptualVocabulary& vocab) {
    const auto tokens = text::tokenize(text_in);
    int count = 0;
    for (const auto& tok : tokens)
        if (vocab.single_terms().count(tok)) ++count;
    for (const auto& phrase : vocab.phrases()) {
        if (phrase.size() > tokens.size()) continue;
        for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
            bool match = true;
            for (std::size_t k = 0; k < phrase.size(); ++k) {
                if (tokens[start + k] != phrase[k]) {
                    match = false;
                    break;
                }
            }
            if (match) ++count;
        }
    }
    return count;
}

std::vector<RawCaptionRecord> filter_records(const std::vector<RawCaptionRecord>& records,
                                             const PerceptualVocabulary& vocab, int min_count) {
    if (min_count < 0) raise(Errc::invalid_argument, "min_count must be >= 0");
    std::vector<RawCaptionRecord> kept;
    for (const auto& rec : records)
        if (count_perceptual_terms(rec.human_description, vocab) >= min_count) kept.push_back(rec);
    return kept;
}

namespace {

json i2t_to_json(const I2TRecord& r) {
    return json{{"image_ref", r.image_ref},
                {"t_p", r.t_p},
                {"t_s", r.t_s},
                {"source", to_string(r.source)},
                {"image_type", to_string(r.image_type)}};
}

template <typename Fn>
void for_each_jsonl_line(const std::string& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open for reading: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            raise(Errc::malformed_line, path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            fn(j, line_no);
        } catch (const json::exception& e) {
            raise(Errc::malformed_line, path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

} // namespace

std::vector<I2TRecord> load_dataset(const std::string& path) {
    std::vector<I2TRecord> records;
    std::unordered_set<std::string> refs;
    for_each_jsonl_line(path, [&](const json& j, std::size_t line_no) {
        I2TRecord r;
        r.image_ref = j.at("image_ref").get<std::string>();
        r.t_p = j.at("t_p").get<std::string>();
        r.t_s = j.at("t_s").get<std::string>();
        r.source = source_from_string(j.at("source").get<std::string>());
        r.image_type = image_type_from_string(j.at("image_type").get<std::string>());
        if (r.t_p.empty() || r.t_s.empty())
            raise(Errc::empty_field, path + ": line " + std::to_string(line_no) + ": empty t_p or t_s");
        if (!refs.insert(r.image_ref).second)
            raise(Errc::duplicate_image_ref,
                  path + ": line " + std::to_string(line_no) + ": duplicate image_ref '" + r.image_ref + "'");
        records.push_back(std::move(r));
    });
    return records;
}

void save_dataset(const std::vector<I2TRecord>& records, const std::string& path) {
    std::unordered_set<std::string> refs;
    std::string out;
    for (const auto& r : records) {
        if (r.t_p.empty() || r.t_s.empty()) raise(Errc::empty_field, "record has empty t_p or t_s");
        if (!refs.insert(r.image_ref).second)
            raise(Errc::duplicate_image_ref, "duplicate image_ref '" + r.image_ref + "'");
        out += i2t_to_json(r).dump();
        out += '\n';
    }
    io::write_file(path, out);
}

std::vector<RawCaptionRecord> load_raw_captions(const std::string& path) {
    std::vector<RawCaptionRecord> records;
    for_each_jsonl_line(path, [&](const json& j, std::size_t line_no) {
        RawCaptionRecord r;
        r.image_ref = j.at("image_ref").get<std::string>();
        r.human_description = j.at("human_description").get<std::string>();
        r.source = source_from_string(j.at("source").get<std::string>());
        if (j.contains("image_type")) r.image_type = image_type_from_string(j.at("image_type").get<std::string>());
        if (r.human_description.empty())
            raise(Errc::empty_field, path + ": line " + std::to_string(line_no) + ": empty human_description");
        records.push_back(std::move(r));
    });
    return records;
}

void save_raw_captions(const std::vector<RawCaptionRecord>& records, const std::string& path) {
    std::string out;
    for (const auto& r : records) {
        json j{{"image_ref", r.image_ref},
               {"human_description", r.human_description},
               {"source", to_string(r.source)},
               {"image_type", to_string(r.image_type)}};
        out += j.dump();
        out += '\n';
    }
    io::write_file(path, out);
}

} // namespace declip
