#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace declip {

enum class Source { aes_expert, q_instruct, share_gpt4v, ava_comments, synthetic, other };
enum class ImageType { natural, art, aigc };

std::string to_string(Source s);
std::string to_string(ImageType t);
Source source_from_string(const std::string& s);       // throws Errc::invalid_argument
ImageType image_type_from_string(const std::string& s);

// One image with its perceptual text T_p and semantic text T_s.
struct I2TRecord {
    std::string image_ref;
    std::string t_p;
    std::string t_s;
    Source source = Source::other;
    ImageType image_type = ImageType::natural;

    bool operator==(const I2TRecord&) const = default;
};

// Upstream caption awaiting decoupled relabeling.
struct RawCaptionRecord {
    std::string image_ref;
    std::string human_description;
    Source source = Source::other;
    ImageType image_type = ImageType::natural;

    bool operator==(const RawCaptionRecord&) const = default;
};

// Lowercase perceptual term list; multi-word phrases allowed. Entries are
// normalized on construction and deduplicated.
class PerceptualVocabulary {
public:
    explicit PerceptualVocabulary(const std::vector<std::string>& terms);

    std::size_t size() const { return n_terms_; }
    const std::unordered_set<std::string>& single_terms() const { return singles_; }
    const std::vector<std::vector<std::string>>& phrases() const { return phrases_; }

private:
    std::size_t n_terms_ = 0;
    std::unordered_set<std::string> singles_;
    std::vector<std::vector<std::string>> phrases_;
};

PerceptualVocabulary load_vocabulary(const std::string& path);

// Occurrence count of vocabulary terms in `text`: single-word entries match
// whole tokens, multi-word entries match contiguous token runs (every start
// position counts, so overlaps are counted).
int count_perceptual_terms(const std::string& text, const PerceptualVocabulary& vocab);

// Keeps records whose description holds at least `min_count` occurrences.
// Order-preserving; the input is untouched.
std::vector<RawCaptionRecord> filter_records(const std::vector<RawCaptionRecord>& records,
                                             const PerceptualVocabulary& vocab, int min_count = 7);

// JSONL persistence. One record per line, UTF-8, fields
// {"image_ref","t_p","t_s","source","image_type"}; raw captions use
// {"image_ref","human_description","source"[,"image_type"]}.
std::vector<I2TRecord> load_dataset(const std::string& path);
void save_dataset(const std::vector<I2TRecord>& records, const std::string& path);
std::vector<RawCaptionRecord> load_raw_captions(const std::string& path);
void save_raw_captions(const std::vector<RawCaptionRecord>& records, const std::string& path);

} // namespace declip
