#include "declip/assess.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/metrics.hpp"

namespace declip {

using nlohmann::json;

void AntonymPromptPair::validate() const {
    if (positive.empty() || negative.empty())
        raise(Errc::empty_text, "antonym prompts must be non-empty");
    if (positive == negative)
        raise(Errc::invalid_argument, "antonym prompts must differ");
}

double score_from_embeddings(const std::vector<double>& image_emb, const std::vector<double>& positive,
                             const std::vector<double>& negative) {
    const double cp = cosine(image_emb, positive);
    const double cn = cosine(image_emb, negative);
    // exp(cp) / (exp(cp) + exp(cn)) = sigmoid(cp - cn), stable in either tail.
    return 1.0 / (1.0 + std::exp(cn - cp));
}

double zero_shot_score(const DeclipModel& model, const std::string& image_ref,
                       const AntonymPromptPair& prompts, bool baseline) {
    prompts.validate();
    const std::vector<double> x = baseline ? model.encoder->encode_image(image_ref).values
                                           : project_perceptual(model, image_ref).values;
    const EmbeddingVector tp = model.encoder->encode_text(prompts.positive);
    const EmbeddingVector tn = model.encoder->encode_text(prompts.negative);
    return score_from_embeddings(x, tp.values, tn.values);
}

std::map<std::string, AntonymPromptPair> default_attribute_prompts() {
    return {
        {"brightness", {"Bright photo.", "Dark photo.", "brightness"}},
        {"colorfulness", {"Colorful photo.", "Dull photo.", "colorfulness"}},
        {"contrast", {"High contrast photo.", "Low contrast photo.", "contrast"}},
        {"noise", {"Clean photo.", "Noisy photo.", "noise"}},
        {"sharpness", {"Sharp photo.", "Blurry photo.", "sharpness"}},
        {"composition", {"Well composed photo.", "Poorly composed photo.", "composition"}},
        {"color", {"Harmonious colors.", "Jarring colors.", "color"}},
        {"depth_of_field", {"Pleasing depth of field.", "Flat depth of field.", "depth_of_field"}},
        {"light", {"Beautiful lighting.", "Harsh lighting.", "light"}},
        {"object_emphasis", {"Clear subject emphasis.", "No subject emphasis.", "object_emphasis"}},
    };
}

std::map<std::string, AntonymPromptPair> load_attribute_prompts(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        raise(Errc::malformed_line, path + ": " + e.what());
    }
    std::map<std::string, AntonymPromptPair> table;
    for (const auto& [key, v] : j.items()) {
        AntonymPromptPair p;
        p.positive = v.at("positive").get<std::string>();
        p.negative = v.at("negative").get<std::string>();
        p.attribute = key;
        p.validate();
        table[key] = p;
    }
    if (table.empty()) raise(Errc::invalid_argument, path + ": empty attribute prompt table");
    return table;
}

void save_attribute_prompts(const std::map<std::string, AntonymPromptPair>& table,
                            const std::string& path) {
    json j = json::object();
    for (const auto& [key, p] : table) j[key] = {{"positive", p.positive}, {"negative", p.negative}};
    io::write_file(path, j.dump(2) + "\n");
}

double attribute_score(const DeclipModel& model, const std::string& image_ref,
                       const std::string& attribute,
                       const std::map<std::string, AntonymPromptPair>& table, bool baseline) {
    const auto it = table.find(attribute);
    if (it == table.end()) raise(Errc::unknown_attribute, "no prompts for attribute '" + attribute + "'");
    return zero_shot_score(model, image_ref, it->second, baseline);
}

// --- MOS CSV ---------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        raise(Errc::malformed_line, where + ": not a number: '" + s + "'");
    }
}

} // namespace

std::vector<MosItem> load_mos_csv(const std::string& path) {
    std::istringstream in(io::read_file(path));
    std::string line;
    if (!std::getline(in, line)) raise(Errc::malformed_line, path + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "image_ref" || header[1] != "mos")
        raise(Errc::malformed_line, path + ": header must start with image_ref,mos");
    if ((header.size() - 2) % 2 != 0)
        raise(Errc::malformed_line, path + ": attribute columns must come in pairs");

    std::vector<MosItem> items;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ": line " + std::to_string(line_no);
        if (fields.size() < 2 || fields.size() > header.size() || (fields.size() - 2) % 2 != 0)
            raise(Errc::malformed_line, where + ": wrong field count");
        MosItem item;
        item.image_ref = fields[0];
        if (item.image_ref.empty()) raise(Errc::malformed_line, where + ": empty image_ref");
        item.mos = parse_double(fields[1], where);
        for (std::size_t k = 2; k + 1 < fields.size(); k += 2) {
            if (fields[k].empty()) continue;
            item.attrs.emplace_back(fields[k], parse_double(fields[k + 1], where));
        }
        items.push_back(std::move(item));
    }
    return items;
}

void save_mos_csv(const std::vector<MosItem>& items, const std::string& path) {
    std::size_t max_attrs = 0;
    for (const auto& it : items) max_attrs = std::max(max_attrs, it.attrs.size());
    std::string out = "image_ref,mos";
    for (std::size_t k = 0; k < max_attrs; ++k) out += ",attribute,attr_value";
    out += '\n';
    std::ostringstream ss;
    ss << out;
    for (const auto& it : items) {
        ss << csv_quote(it.image_ref) << ',' << it.mos;
        for (const auto& [name, value] : it.attrs) ss << ',' << csv_quote(name) << ',' << value;
        ss << '\n';
    }
    io::write_file(path, ss.str());
}

// --- evaluation ------------------------------------------------------------

EvalReport evaluate_dataset(const DeclipModel& model, const std::vector<MosItem>& items,
                            const AntonymPromptPair& prompts, const EvalOptions& options) {
    prompts.validate();
    if (items.size() < 2) raise(Errc::dataset_too_small, "evaluate_dataset needs >= 2 items");

    EvalReport report;
    report.dataset_name = options.dataset_name;
    report.checkpoint_id = options.checkpoint_id;
    report.prompt_set = prompts.positive + " | " + prompts.negative;
    report.config_hash = options.config_hash;
    report.seed = options.seed;
    report.baseline = options.baseline;
    report.logistic_remap = options.logistic_remap;

    const EmbeddingVector tp = model.encoder->encode_text(prompts.positive);
    const EmbeddingVector tn = model.encoder->encode_text(prompts.negative);

    std::vector<const MosItem*> scored_items;
    for (const auto& item : items) {
        std::vector<double> x;
        try {
            x = options.baseline ? model.encoder->encode_image(item.image_ref).values
                                 : project_perceptual(model, item.image_ref).values;
        } catch (const Error& e) {
            if (e.code() == Errc::unknown_key || e.code() == Errc::io_error ||
                e.code() == Errc::corrupt_blob) {
                ++report.n_missing;
                continue;
            }
            throw;
        }
        report.items.push_back({item.image_ref, score_from_embeddings(x, tp.values, tn.values), item.mos});
        scored_items.push_back(&item);
    }
    report.n_items = static_cast<int>(report.items.size());
    if (report.n_items < 2)
        raise(Errc::dataset_too_small, "fewer than 2 items could be scored (" +
                                           std::to_string(report.n_missing) + " missing)");

    std::vector<double> scores, mos;
    scores.reserve(report.items.size());
    mos.reserve(report.items.size());
    for (const auto& it : report.items) {
        scores.push_back(it.score);
        mos.push_back(it.mos);
    }
    report.srcc = srcc(scores, mos);
    if (options.logistic_remap) {
        const auto params = fit_logistic_remap(scores, mos);
        std::vector<double> remapped(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) remapped[i] = apply_logistic_remap(params, scores[i]);
        report.plcc = plcc(remapped, mos);
    } else {
        report.plcc = plcc(scores, mos);
    }

    if (options.score_attributes) {
        const auto table =
            options.attribute_table.empty() ? default_attribute_prompts() : options.attribute_table;
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_attr;
        for (const MosItem* item : scored_items) {
            for (const auto& [name, truth] : item->attrs) {
                const double s = attribute_score(model, item->image_ref, name, table, options.baseline);
                per_attr[name].first.push_back(s);
                per_attr[name].second.push_back(truth);
            }
        }
        for (auto& [name, sv] : per_attr) {
            AttributeReport ar;
            ar.n_items = static_cast<int>(sv.first.size());
            if (ar.n_items >= 2) {
                ar.srcc = srcc(sv.first, sv.second);
                ar.plcc = plcc(sv.first, sv.second);
            }
            report.attributes[name] = ar;
        }
    }
    return report;
}

// --- report serialization ---------------------------------------------------

namespace {

json opt_to_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

} // namespace

std::string report_to_json(const EvalReport& report) {
    json items = json::array();
    for (const auto& it : report.items)
        items.push_back({{"image_ref", it.image_ref}, {"score", it.score}, {"mos", it.mos}});
    json attrs = json::object();
    for (const auto& [name, ar] : report.attributes)
        attrs[name] = {{"srcc", opt_to_json(ar.srcc)}, {"plcc", opt_to_json(ar.plcc)}, {"n_items", ar.n_items}};
    const json j{{"dataset", report.dataset_name},
                 {"srcc", opt_to_json(report.srcc)},
                 {"plcc", opt_to_json(report.plcc)},
                 {"srcc_defined", report.srcc.has_value()},
                 {"plcc_defined", report.plcc.has_value()},
                 {"n_items", report.n_items},
                 {"n_missing", report.n_missing},
                 {"items", items},
                 {"attributes", attrs},
                 {"meta", {{"checkpoint_id", report.checkpoint_id},
                           {"prompt_set", report.prompt_set},
                           {"config_hash", report.config_hash},
                           {"seed", report.seed},
                           {"baseline", report.baseline},
                           {"logistic_remap", report.logistic_remap}}}};
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
        EvalReport r;
        r.dataset_name = j.at("dataset").get<std::string>();
        r.srcc = opt_from_json(j.at("srcc"));
        r.plcc = opt_from_json(j.at("plcc"));
        r.n_items = j.at("n_items").get<int>();
        r.n_missing = j.at("n_missing").get<int>();
        for (const auto& it : j.at("items"))
            r.items.push_back({it.at("image_ref").get<std::string>(), it.at("score").get<double>(),
                               it.at("mos").get<double>()});
        for (const auto& [name, ar] : j.at("attributes").items()) {
            AttributeReport a;
            a.srcc = opt_from_json(ar.at("srcc"));
            a.plcc = opt_from_json(ar.at("plcc"));
            a.n_items = ar.at("n_items").get<int>();
            r.attributes[name] = a;
        }
        const auto& meta = j.at("meta");
        r.checkpoint_id = meta.at("checkpoint_id").get<std::string>();
        r.prompt_set = meta.at("prompt_set").get<std::string>();
        r.config_hash = meta.at("config_hash").get<std::string>();
        r.seed = meta.at("seed").get<std::uint64_t>();
        r.baseline = meta.at("baseline").get<bool>();
        r.logistic_remap = meta.at("logistic_remap").get<bool>();
        return r;
    } catch (const json::exception& e) {
        raise(Errc::malformed_line, std::string("bad report JSON: ") + e.what());
    }
}

void save_report(const EvalReport& report, const std::string& path) {
    io::write_file(path, report_to_json(report));
}

EvalReport load_report(const std::string& path) { return report_from_json(io::read_file(path)); }

} // namespace declip
