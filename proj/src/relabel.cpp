#include "declip/relabel.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "declip/error.hpp"
#include "declip/text_util.hpp"

namespace declip {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::size_t count_occurrences(const std::string& s, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = s.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string post_relabel(const MllmClientConfig& config, const std::string& prompt,
                         const std::string& image_ref) {
    httplib::Client client(config.base_url);
    client.set_connection_timeout(config.timeout_s, 0);
    client.set_read_timeout(config.timeout_s, 0);
    client.set_write_timeout(config.timeout_s, 0);
    if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
        client.set_bearer_token_auth(key);

    nlohmann::json body{{"model", config.model}, {"prompt", prompt}, {"image_ref", image_ref}};
    const auto res = client.Post("/v1/relabel", body.dump(), "application/json");
    if (!res) raise(Errc::remote_unavailable, "MLLM endpoint unreachable: " + config.base_url);
    if (res->status >= 500)
        raise(Errc::remote_unavailable, "MLLM endpoint returned HTTP " + std::to_string(res->status));
    if (res->status != 200)
        raise(Errc::client_unavailable, "MLLM request rejected with HTTP " + std::to_string(res->status));
    try {
        return nlohmann::json::parse(res->body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_response, std::string("MLLM reply is not {\"text\":...}: ") + e.what());
    }
}

} // namespace

std::string escape_markup(const std::string& s) {
    std::string out = s;
    replace_all(out, "&", "&amp;");
    replace_all(out, "<", "&lt;");
    return out;
}

std::string unescape_markup(const std::string& s) {
    std::string out = s;
    replace_all(out, "&lt;", "<");
    replace_all(out, "&amp;", "&");
    return out;
}

std::string build_relabel_prompt(const RawCaptionRecord& record) {
    if (record.human_description.empty()) raise(Errc::empty_field, "record has empty human_description");
    std::string prompt;
    prompt += "You are annotating a single image for a vision-language dataset.\n";
    prompt += "A human wrote this reference description of the image:\n\n";
    prompt += "<DESCRIPTION>" + escape_markup(record.human_description) + "</DESCRIPTION>\n\n";
    prompt += "Using the image and the reference, write two new descriptions.\n";
    prompt += "1. A purely perceptual description. Cover clarity and sharpness, light and "
              "exposure, composition and framing, color rendition, noise, and the emotional "
              "tone these create. Never name objects, people, places, scenes, or actions.\n";
    prompt += "2. A purely semantic description. Cover the scene, the objects, the people, "
              "and what is happening. Never comment on quality, style, lighting, color, "
              "composition, or mood.\n";
    prompt += "Respond with exactly one <PERCEPTUAL>...</PERCEPTUAL> block followed by exactly "
              "one <SEMANTIC>...</SEMANTIC> block and nothing else. Inside a block, write any "
              "literal '<' as '&lt;' and any literal '&' as '&amp;'.\n";
    return prompt;
}

DecoupledTexts parse_relabel_response(const std::string& response) {
    static const std::string po = "<PERCEPTUAL>";
    static const std::string pc = "</PERCEPTUAL>";
    static const std::string so = "<SEMANTIC>";
    static const std::string sc = "</SEMANTIC>";
    for (const auto* m : {&po, &pc, &so, &sc}) {
        const std::size_t n = count_occurrences(response, *m);
        if (n == 0) raise(Errc::malformed_response, "missing marker " + *m);
        if (n > 1) raise(Errc::malformed_response, "duplicate marker " + *m);
    }
    const std::size_t p0 = response.find(po) + po.size();
    const std::size_t p1 = response.find(pc);
    const std::size_t s0 = response.find(so) + so.size();
    const std::size_t s1 = response.find(sc);
    if (p1 < p0 || s1 < s0 || s0 < p1)
        raise(Errc::malformed_response, "markers out of order");
    DecoupledTexts out;
    out.t_p = text::trim(unescape_markup(response.substr(p0, p1 - p0)));
    out.t_s = text::trim(unescape_markup(response.substr(s0, s1 - s0)));
    if (out.t_p.empty()) raise(Errc::empty_field, "empty perceptual block");
    if (out.t_s.empty()) raise(Errc::empty_field, "empty semantic block");
    return out;
}

HttpMllmClient::HttpMllmClient(MllmClientConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) raise(Errc::invalid_argument, "MLLM client needs a base URL");
    if (config_.requests_per_minute < 1) raise(Errc::invalid_argument, "requests_per_minute must be >= 1");
}

std::string HttpMllmClient::generate(const std::string& prompt, const std::string& image_ref) {
    using namespace std::chrono;

    // Rate cap: keep request starts at least 60/rpm seconds apart, across threads.
    {
        std::unique_lock<std::mutex> lock(rate_mu_);
        const std::int64_t min_gap_us = 60'000'000LL / config_.requests_per_minute;
        const std::int64_t now = duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
        if (last_request_us_ != 0 && now - last_request_us_ < min_gap_us)
            std::this_thread::sleep_for(microseconds(min_gap_us - (now - last_request_us_)));
        last_request_us_ = duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
    }

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(milliseconds(config_.backoff_base_ms << (attempt - 1)));
        try {
            return post_relabel(config_, prompt, image_ref);
        } catch (const Error& e) {
            if (e.code() != Errc::remote_unavailable) throw;
            last_error = e.what();
        }
    }
    raise(Errc::client_unavailable,
          "MLLM unreachable after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

I2TRecord relabel_record(MllmClient& client, const RawCaptionRecord& record) {
    const std::string response = client.generate(build_relabel_prompt(record), record.image_ref);
    const DecoupledTexts texts = parse_relabel_response(response);
    return I2TRecord{record.image_ref, texts.t_p, texts.t_s, record.source, record.image_type};
}

RelabelStats relabel_records(MllmClient& client, const std::vector<RawCaptionRecord>& records,
                             std::vector<I2TRecord>& out, const std::string& rejects_path,
                             int workers) {
    if (workers < 1) workers = 1;
    RelabelStats stats;
    std::ofstream rejects;
    std::mutex mu;
    std::vector<std::pair<std::size_t, I2TRecord>> accepted;

    auto reject = [&](const RawCaptionRecord& rec, const std::string& reason, const std::string& raw) {
        std::lock_guard<std::mutex> lock(mu);
        if (!rejects.is_open()) {
            rejects.open(rejects_path, std::ios::binary | std::ios::app);
            if (!rejects) raise(Errc::io_error, "cannot open rejects file: " + rejects_path);
        }
        nlohmann::json j{{"image_ref", rec.image_ref},
                         {"source", to_string(rec.source)},
                         {"reason", reason},
                         {"raw_response", raw}};
        rejects << j.dump() << '\n';
        ++stats.rejected;
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&]() {
        for (;;) {
            {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (failure) return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            const RawCaptionRecord& rec = records[i];
            std::string raw;
            try {
                raw = client.generate(build_relabel_prompt(rec), rec.image_ref);
                const DecoupledTexts texts = parse_relabel_response(raw);
                std::lock_guard<std::mutex> lock(mu);
                accepted.emplace_back(i, I2TRecord{rec.image_ref, texts.t_p, texts.t_s, rec.source,
                                                   rec.image_type});
            } catch (const Error& e) {
                if (e.code() == Errc::malformed_response || e.code() == Errc::empty_field) {
                    reject(rec, e.what(), raw);
                } else {
                    // client-unavailable and friends abort the run
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::sort(accepted.begin(), accepted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, rec] : accepted) out.push_back(std::move(rec));
    stats.relabeled = accepted.size();
    return stats;
}

} // namespace declip
