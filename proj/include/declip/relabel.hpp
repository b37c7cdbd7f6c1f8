#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "declip/i2t.hpp"

namespace declip {

// Marker-delimited escaping used inside prompts and responses. '&' -> "&amp;"
// and '<' -> "&lt;", so escaped content can never collide with a marker.
std::string escape_markup(const std::string& s);
std::string unescape_markup(const std::string& s);

inline constexpr const char* kRelabelPromptVersion = "prompt_v1";

// Instruction prompt asking an MLLM for decoupled descriptions. The human
// description is embedded (escaped) between <DESCRIPTION> markers; the reply
// must carry exactly one <PERCEPTUAL> and one <SEMANTIC> block.
std::string build_relabel_prompt(const RawCaptionRecord& record);

struct DecoupledTexts {
    std::string t_p;
    std::string t_s;
};

// Extracts and unescapes the two blocks. Missing, duplicated, or out-of-order
// markers raise Errc::malformed_response; blank block content raises
// Errc::empty_field.
DecoupledTexts parse_relabel_response(const std::string& response);

// External MLLM access. Implementations receive the full prompt plus the
// image reference and return the raw completion text.
class MllmClient {
public:
    virtual ~MllmClient() = default;
    virtual std::string generate(const std::string& prompt, const std::string& image_ref) = 0;
};

struct MllmClientConfig {
    std::string base_url;
    std::string model = "default";
    std::string api_key_env = "DECLIP_MLLM_KEY";
    int max_retries = 3;
    int backoff_base_ms = 500; // doubles per retry
    int requests_per_minute = 60;
    int timeout_s = 60;
};

// POST {base_url}/v1/relabel {"model","prompt","image_ref"} -> {"text":...},
// bearer auth from the configured env var, exponential backoff, rate cap.
class HttpMllmClient : public MllmClient {
public:
    explicit HttpMllmClient(MllmClientConfig config);
    std::string generate(const std::string& prompt, const std::string& image_ref) override;

private:
    MllmClientConfig config_;
    std::mutex rate_mu_;
    std::int64_t last_request_us_ = 0;
};

I2TRecord relabel_record(MllmClient& client, const RawCaptionRecord& record);

struct RelabelStats {
    std::size_t relabeled = 0;
    std::size_t rejected = 0;
};

// Relabels a batch; responses failing validation are appended to the rejects
// JSONL (with the raw response) instead of being dropped. `workers` bounds
// the number of concurrent in-flight requests.
RelabelStats relabel_records(MllmClient& client, const std::vector<RawCaptionRecord>& records,
                             std::vector<I2TRecord>& out, const std::string& rejects_path,
                             int workers = 1);

} // namespace declip
