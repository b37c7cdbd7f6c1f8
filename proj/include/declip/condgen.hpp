#pragma once

#include <string>
#include <vector>

#include "declip/model.hpp"

namespace declip {

// The two control types a downstream generator can consume: decoupled image
// embedding plus the complementary text embedding.
enum class ConditionMode { perceptual_image_semantic_text, semantic_image_perceptual_text };

std::string to_string(ConditionMode mode);
ConditionMode condition_mode_from_string(const std::string& s); // throws Errc::invalid_mode

struct ConditionBundle {
    ConditionMode mode = ConditionMode::perceptual_image_semantic_text;
    std::vector<double> image_embedding; // f_I(p) or f_I(s), float32 grid
    std::vector<double> text_embedding;  // f_T(s) or f_T(p), float32 grid
    // provenance
    std::string image_ref;
    std::string text;
    std::string checkpoint_id;
    std::string image_projection; // "perceptual" | "semantic", must match mode
};

// Mode/role consistency, matching dims, finite values.
void validate_bundle(const ConditionBundle& bundle);

// Picks the projector matching the mode for the image side and the raw text
// encoding for the text side. Embeddings are snapped to the float32 grid so
// export/import round-trips are bitwise.
ConditionBundle assemble_condition(const DeclipModel& model, ConditionMode mode,
                                   const std::string& image_ref, const std::string& text);

// "DECLIP-COND v1" + one-line JSON metadata + two little-endian float32 blobs
// (image embedding, then text embedding).
void export_condition(const ConditionBundle& bundle, const std::string& path);
ConditionBundle import_condition(const std::string& path);

} // namespace declip
