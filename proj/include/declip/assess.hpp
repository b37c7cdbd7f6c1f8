#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "declip/model.hpp"

namespace declip {

// Antonym prompt pair behind the two-way softmax score.
struct AntonymPromptPair {
    std::string positive = "Good photo.";
    std::string negative = "Bad photo.";
    std::string attribute; // empty for overall quality

    void validate() const;
};

// Two-way softmax over cosine logits:
//   s = exp(cos(x, tp)) / (exp(cos(x, tp)) + exp(cos(x, tn)))
// exactly as written, without a temperature.
double score_from_embeddings(const std::vector<double>& image_emb, const std::vector<double>& positive,
                             const std::vector<double>& negative);

// Scores one image with the PERCEPTUAL projection. `baseline=true` bypasses
// the projector and scores the raw encoder embedding (vanilla comparison).
double zero_shot_score(const DeclipModel& model, const std::string& image_ref,
                       const AntonymPromptPair& prompts, bool baseline = false);

// Editable antonym table for fine-grained attributes; returned keys:
// brightness, colorfulness, contrast, noise, sharpness, composition, color,
// depth_of_field, light, object_emphasis.
std::map<std::string, AntonymPromptPair> default_attribute_prompts();
std::map<std::string, AntonymPromptPair> load_attribute_prompts(const std::string& path);
void save_attribute_prompts(const std::map<std::string, AntonymPromptPair>& table,
                            const std::string& path);

double attribute_score(const DeclipModel& model, const std::string& image_ref,
                       const std::string& attribute,
                       const std::map<std::string, AntonymPromptPair>& table, bool baseline = false);

// One row of a MOS dataset; attrs carries optional per-attribute ground truth.
struct MosItem {
    std::string image_ref;
    double mos = 0.0;
    std::vector<std::pair<std::string, double>> attrs;
};

// CSV "image_ref,mos[,attribute,attr_value]*" with header.
std::vector<MosItem> load_mos_csv(const std::string& path);
void save_mos_csv(const std::vector<MosItem>& items, const std::string& path);

struct ScoredItem {
    std::string image_ref;
    double score = 0.0;
    double mos = 0.0;
};

struct AttributeReport {
    std::optional<double> srcc;
    std::optional<double> plcc;
    int n_items = 0;
};

struct EvalReport {
    std::string dataset_name;
    std::optional<double> srcc;
    std::optional<double> plcc;
    int n_items = 0;
    int n_missing = 0;
    std::vector<ScoredItem> items;
    std::map<std::string, AttributeReport> attributes;
    // run metadata
    std::string checkpoint_id;
    std::string prompt_set;
    std::string config_hash;
    std::uint64_t seed = 0;
    bool baseline = false;
    bool logistic_remap = false;
};

struct EvalOptions {
    bool baseline = false;
    bool logistic_remap = false;                       // PLCC preprocessing, off by default
    bool score_attributes = false;                     // per-attribute sub-reports
    std::map<std::string, AntonymPromptPair> attribute_table;
    std::string dataset_name = "dataset";
    std::string checkpoint_id;
    std::string config_hash;
    std::uint64_t seed = 0;
};

// Scores every item and correlates with MOS. Unresolvable image refs are
// counted and excluded, never silently skipped; fewer than 2 resolvable items
// is an error.
EvalReport evaluate_dataset(const DeclipModel& model, const std::vector<MosItem>& items,
                            const AntonymPromptPair& prompts, const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
void save_report(const EvalReport& report, const std::string& path);
EvalReport load_report(const std::string& path);

// Score-vs-MOS scatter as a standalone SVG.
void write_scatter_svg(const EvalReport& report, const std::string& path);

} // namespace declip
