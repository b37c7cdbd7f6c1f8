// declip: dataset curation, projector training, zero-shot scoring, and
// condition export on top of a frozen dual encoder.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "declip/assess.hpp"
#include "declip/bench.hpp"
#include "declip/condgen.hpp"
#include "declip/config.hpp"
#include "declip/coop.hpp"
#include "declip/error.hpp"
#include "declip/i2t.hpp"
#include "declip/io_util.hpp"
#include "declip/model.hpp"
#include "declip/relabel.hpp"
#include "declip/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw UsageError(what + " not found: " + path);
}

// --- encoder / model plumbing ----------------------------------------------

struct EncoderFlags {
    std::string kind = "toy";
    int dim = 64;
    std::uint64_t seed = 17;
    std::string store;
    std::string url;
    std::string image_root;
};

void add_encoder_flags(CLI::App* cmd, EncoderFlags& flags) {
    cmd->add_option("--encoder", flags.kind, "Encoder backend: toy, store, or remote")
        ->check(CLI::IsMember({"toy", "store", "remote"}));
    cmd->add_option("--dim", flags.dim, "Embedding dimension (toy/remote backends)");
    cmd->add_option("--encoder-seed", flags.seed, "Seed of the toy backend");
    cmd->add_option("--store", flags.store, "Embedding store file (store backend)");
    cmd->add_option("--url", flags.url, "Base URL of the encode service (remote backend)");
    cmd->add_option("--image-root", flags.image_root, "Directory image refs are resolved against");
}

std::shared_ptr<const declip::EncoderBackend> make_backend(const EncoderFlags& flags) {
    if (flags.kind == "toy")
        return std::make_shared<declip::ToyEncoder>(flags.dim, flags.seed, flags.image_root);
    if (flags.kind == "store") {
        if (flags.store.empty()) throw UsageError("store backend needs --store");
        require_file(flags.store, "embedding store");
        return declip::load_embedding_store(flags.store);
    }
    if (flags.url.empty()) throw UsageError("remote backend needs --url");
    return std::make_shared<declip::RemoteBackend>(flags.url, flags.dim);
}

// Rebuilds the encoder a checkpoint was trained with; store/remote backends
// still need their --store/--url source.
std::shared_ptr<const declip::EncoderBackend> backend_for_checkpoint(const std::string& ckpt_path,
                                                                     const EncoderFlags& flags) {
    const declip::CheckpointInfo info = declip::peek_checkpoint(ckpt_path);
    EncoderFlags resolved = flags;
    switch (info.encoder.kind) {
        case declip::BackendKind::toy_deterministic:
            resolved.kind = "toy";
            resolved.dim = info.encoder.dim;
            resolved.seed = info.encoder.seed;
            break;
        case declip::BackendKind::precomputed_store:
            resolved.kind = "store";
            break;
        case declip::BackendKind::remote_service:
            resolved.kind = "remote";
            resolved.dim = info.encoder.dim;
            break;
    }
    return make_backend(resolved);
}

struct ModelFlags {
    std::string checkpoint;
    bool init = false;
    int hidden = 1024;
    double tau = 0.07;
    std::uint64_t seed = 0;
    EncoderFlags encoder;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--checkpoint", flags.checkpoint, "Trained checkpoint file");
    cmd->add_flag("--init", flags.init, "Use freshly initialized (identity) projectors");
    cmd->add_option("--hidden", flags.hidden, "Projector latent width for --init");
    cmd->add_option("--tau", flags.tau, "Temperature for --init");
    cmd->add_option("--seed", flags.seed, "Model init seed for --init");
    add_encoder_flags(cmd, flags.encoder);
}

declip::DeclipModel resolve_model(const ModelFlags& flags, std::string* ckpt_id = nullptr) {
    if (!flags.checkpoint.empty()) {
        require_file(flags.checkpoint, "checkpoint");
        auto backend = backend_for_checkpoint(flags.checkpoint, flags.encoder);
        if (ckpt_id) *ckpt_id = declip::checkpoint_id(flags.checkpoint);
        return declip::load_checkpoint(flags.checkpoint, std::move(backend));
    }
    if (!flags.init) throw UsageError("pass --checkpoint FILE or --init");
    auto model = declip::make_declip_model(make_backend(flags.encoder), flags.hidden, flags.tau, flags.seed);
    if (ckpt_id) *ckpt_id = "init-" + declip::io::hex64(declip::param_checksum(model));
    return model;
}

declip::RunConfig stamp_config(const std::vector<std::pair<std::string, std::string>>& entries) {
    declip::RunConfig config;
    for (const auto& [k, v] : entries) config.set(k, v);
    return config;
}

// --- subcommand payloads -----------------------------------------------------

int run_filter(const std::string& in, const std::string& vocab_path, int min_count,
               const std::string& out, const std::string& stats_path) {
    require_file(in, "input JSONL");
    require_file(vocab_path, "vocabulary file");
    const auto vocab = declip::load_vocabulary(vocab_path);
    const auto records = declip::load_raw_captions(in);
    const auto kept = declip::filter_records(records, vocab, min_count);
    declip::save_raw_captions(kept, out);

    std::map<int, int> histogram;
    for (const auto& r : records) ++histogram[declip::count_perceptual_terms(r.human_description, vocab)];
    const auto config = stamp_config({{"filter.in", in},
                                      {"filter.vocab", vocab_path},
                                      {"filter.min_count", std::to_string(min_count)},
                                      {"filter.out", out}});
    json hist = json::object();
    for (const auto& [count, n] : histogram) hist[std::to_string(count)] = n;
    const json stats{{"input", records.size()},
                     {"kept", kept.size()},
                     {"dropped", records.size() - kept.size()},
                     {"min_count", min_count},
                     {"histogram", hist},
                     {"config_hash", declip::io::hex64(config.hash())}};
    if (!stats_path.empty()) declip::io::write_file(stats_path, stats.dump(2) + "\n");
    std::cout << stats.dump(2) << std::endl;
    return kExitOk;
}

int run_relabel(const std::string& in, const std::string& out, const std::string& rejects,
                declip::MllmClientConfig client_config, int workers) {
    require_file(in, "input JSONL");
    const auto records = declip::load_raw_captions(in);
    declip::HttpMllmClient client(std::move(client_config));
    std::vector<declip::I2TRecord> relabeled;
    const auto stats = declip::relabel_records(client, records, relabeled, rejects, workers);
    declip::save_dataset(relabeled, out);
    std::cout << "relabeled " << stats.relabeled << " records, rejected " << stats.rejected << " (see "
              << rejects << ")" << std::endl;
    return kExitOk;
}

declip::TrainConfig train_config_from(const declip::RunConfig& config) {
    declip::TrainConfig tc;
    tc.batch_size = static_cast<int>(config.get_int("train.batch_size", tc.batch_size));
    tc.epochs = static_cast<int>(config.get_int("train.epochs", tc.epochs));
    tc.learning_rate = config.get_double("train.learning_rate", tc.learning_rate);
    tc.weight_decay = config.get_double("train.weight_decay", tc.weight_decay);
    tc.tau = config.get_double("train.tau", tc.tau);
    tc.seed = static_cast<std::uint64_t>(config.get_int("train.seed", 0));
    tc.checkpoint_dir = config.get("train.checkpoint_dir", "");
    return tc;
}

EncoderFlags encoder_flags_from(const declip::RunConfig& config) {
    EncoderFlags flags;
    flags.kind = config.get("encoder.kind", flags.kind);
    flags.dim = static_cast<int>(config.get_int("encoder.dim", flags.dim));
    flags.seed = static_cast<std::uint64_t>(config.get_int("encoder.seed", flags.seed));
    flags.store = config.get("encoder.store", "");
    flags.url = config.get("encoder.url", "");
    flags.image_root = config.get("data.image_root", "");
    return flags;
}

int run_train(declip::RunConfig config) {
    const std::string dataset_path = config.require("data.dataset");
    require_file(dataset_path, "dataset");
    EncoderFlags eflags = encoder_flags_from(config);
    if (eflags.image_root.empty()) {
        eflags.image_root = fs::path(dataset_path).parent_path().string();
        config.set("data.image_root", eflags.image_root);
    }
    const declip::TrainConfig tc = train_config_from(config);
    if (tc.checkpoint_dir.empty()) throw UsageError("config needs train.checkpoint_dir");

    const auto dataset = declip::load_dataset(dataset_path);
    auto model = declip::make_declip_model(make_backend(eflags),
                                           static_cast<int>(config.get_int("train.hidden", 1024)),
                                           tc.tau, tc.seed);
    model.normalize_projection = config.get_bool("train.normalize_projection", true);

    const auto result = declip::train(model, dataset, tc);

    const json run_meta{{"config_hash", declip::io::hex64(config.hash())},
                        {"seed", tc.seed},
                        {"final_checkpoint", result.final_checkpoint},
                        {"checkpoint_id", declip::checkpoint_id(result.final_checkpoint)},
                        {"encoder_probe_before", declip::io::hex64(result.encoder_probe_before)},
                        {"encoder_probe_after", declip::io::hex64(result.encoder_probe_after)},
                        {"epochs", result.epochs.size()},
                        {"first_epoch_loss", result.epochs.empty() ? 0.0 : result.epochs.front().mean_loss},
                        {"final_epoch_loss", result.epochs.empty() ? 0.0 : result.epochs.back().mean_loss}};
    declip::io::write_file((fs::path(tc.checkpoint_dir) / "run_meta.json").string(),
                           run_meta.dump(2) + "\n");
    std::cout << run_meta.dump(2) << std::endl;
    if (result.encoder_probe_before != result.encoder_probe_after) {
        std::cerr << "encoder outputs changed during training" << std::endl;
        return kExitDomain;
    }
    return kExitOk;
}

int run_eval(const ModelFlags& mflags, const std::string& mos_path, const std::string& positive,
             const std::string& negative, bool baseline, bool attributes, bool logistic_remap,
             const std::string& prompt_table, const std::string& dataset_name,
             const std::string& report_path, const std::string& svg_path) {
    require_file(mos_path, "MOS csv");
    declip::EvalOptions options;
    options.baseline = baseline;
    options.logistic_remap = logistic_remap;
    options.score_attributes = attributes;
    if (!prompt_table.empty()) {
        require_file(prompt_table, "prompt table");
        options.attribute_table = declip::load_attribute_prompts(prompt_table);
    }
    options.dataset_name = dataset_name;
    const auto model = resolve_model(mflags, &options.checkpoint_id);
    options.seed = mflags.seed;
    options.config_hash = declip::io::hex64(
        stamp_config({{"eval.mos", mos_path},
                      {"eval.positive", positive},
                      {"eval.negative", negative},
                      {"eval.baseline", baseline ? "true" : "false"},
                      {"eval.checkpoint", mflags.checkpoint},
                      {"eval.image_root", mflags.encoder.image_root}})
            .hash());

    const auto items = declip::load_mos_csv(mos_path);
    const declip::AntonymPromptPair prompts{positive, negative, ""};
    const auto report = declip::evaluate_dataset(model, items, prompts, options);
    if (!report_path.empty()) declip::save_report(report, report_path);
    if (!svg_path.empty()) declip::write_scatter_svg(report, svg_path);

    std::cout << "dataset=" << report.dataset_name << " n=" << report.n_items
              << " missing=" << report.n_missing << " srcc="
              << (report.srcc ? std::to_string(*report.srcc) : std::string("undefined")) << " plcc="
              << (report.plcc ? std::to_string(*report.plcc) : std::string("undefined")) << std::endl;
    for (const auto& [name, ar] : report.attributes)
        std::cout << "  attribute " << name << ": n=" << ar.n_items << " srcc="
                  << (ar.srcc ? std::to_string(*ar.srcc) : std::string("undefined")) << " plcc="
                  << (ar.plcc ? std::to_string(*ar.plcc) : std::string("undefined")) << std::endl;
    return kExitOk;
}

int run_score(const ModelFlags& mflags, const std::string& image_ref, const std::string& positive,
              const std::string& negative) {
    const auto model = resolve_model(mflags);
    const declip::AntonymPromptPair prompts{positive, negative, ""};
    std::printf("%.6f\n", declip::zero_shot_score(model, image_ref, prompts));
    return kExitOk;
}

int run_attr(const ModelFlags& mflags, const std::string& image_ref, const std::string& attribute,
             const std::string& prompt_table) {
    const auto model = resolve_model(mflags);
    auto table = declip::default_attribute_prompts();
    if (!prompt_table.empty()) {
        require_file(prompt_table, "prompt table");
        table = declip::load_attribute_prompts(prompt_table);
    }
    std::printf("%.6f\n", declip::attribute_score(model, image_ref, attribute, table));
    return kExitOk;
}

int run_coop(const ModelFlags& mflags, const std::string& mos_path, const std::string& positive,
             const std::string& negative, declip::CoopConfig config, const std::string& out_path) {
    require_file(mos_path, "MOS csv");
    const auto model = resolve_model(mflags);
    const auto items = declip::load_mos_csv(mos_path);
    const declip::AntonymPromptPair prompts{positive, negative, ""};

    const std::uint64_t checksum_before = declip::param_checksum(model);
    const auto result = declip::coop_tune(model, items, prompts, config);
    if (declip::param_checksum(model) != checksum_before) {
        std::cerr << "model parameters changed during prompt tuning" << std::endl;
        return kExitDomain;
    }
    declip::save_prompt_vector(result.prompt, out_path);
    std::cout << "tuned " << config.m << " context rows over " << config.epochs << " epochs; final loss "
              << (result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back()) << "; saved to " << out_path
              << std::endl;
    return kExitOk;
}

int run_bench(std::uint64_t seed, int items, int perc, int sem, const std::string& out_dir) {
    const auto bench = declip::make_synthetic_benchmark(seed, items, perc, sem);
    declip::write_benchmark(bench, out_dir, seed);
    std::cout << "wrote " << bench.records.size() << " items (" << perc << " blur levels x " << sem
              << " shapes) under " << out_dir << std::endl;
    return kExitOk;
}

int run_cond(const ModelFlags& mflags, const std::string& mode_str, const std::string& image_ref,
             const std::string& text, const std::string& out_path) {
    const auto mode = declip::condition_mode_from_string(mode_str);
    const auto model = resolve_model(mflags);
    const auto bundle = declip::assemble_condition(model, mode, image_ref, text);
    declip::export_condition(bundle, out_path);
    std::cout << "wrote " << declip::to_string(mode) << " condition (dim " << bundle.image_embedding.size()
              << ") to " << out_path << std::endl;
    return kExitOk;
}

int run_plot(const std::string& report_path, const std::string& out_path) {
    require_file(report_path, "report JSON");
    declip::write_scatter_svg(declip::load_report(report_path), out_path);
    std::cout << "wrote " << out_path << std::endl;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decoupled perceptual/semantic embedding toolkit"};
    app.require_subcommand(1);
    int workers = 1;
    app.add_option("--workers", workers, "Worker threads for batched client calls")->capture_default_str();

    // filter
    auto* filter = app.add_subcommand("filter", "Keep captions rich in perceptual vocabulary");
    std::string f_in, f_vocab, f_out, f_stats;
    int f_min = 7;
    filter->add_option("--in", f_in, "Raw caption JSONL")->required();
    filter->add_option("--vocab", f_vocab, "Perceptual vocabulary file")->required();
    filter->add_option("--min-count", f_min, "Minimum occurrences to keep a record")
        ->capture_default_str();
    filter->add_option("--out", f_out, "Filtered JSONL")->required();
    filter->add_option("--stats", f_stats, "Stats JSON path");

    // relabel
    auto* relabel = app.add_subcommand("relabel", "Ask an MLLM for decoupled descriptions");
    std::string r_in, r_out, r_rejects = "rejects.jsonl";
    declip::MllmClientConfig r_client;
    relabel->add_option("--in", r_in, "Raw caption JSONL")->required();
    relabel->add_option("--out", r_out, "Output dataset JSONL")->required();
    relabel->add_option("--rejects", r_rejects, "Rejects JSONL")->capture_default_str();
    relabel->add_option("--base-url", r_client.base_url, "MLLM endpoint base URL")->required();
    relabel->add_option("--model", r_client.model, "Model name")->capture_default_str();
    relabel->add_option("--api-key-env", r_client.api_key_env, "Env var holding the API key")
        ->capture_default_str();
    relabel->add_option("--max-retries", r_client.max_retries, "Retries per request")->capture_default_str();
    relabel->add_option("--backoff-ms", r_client.backoff_base_ms, "Base backoff in ms")
        ->capture_default_str();
    relabel->add_option("--rpm", r_client.requests_per_minute, "Requests-per-minute cap")
        ->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "Fit the two projectors on an I2T dataset");
    std::string t_config;
    std::vector<std::pair<std::string, std::string>> t_overrides;
    train->add_option("--config", t_config, "INI config file")->required();
    std::string t_dataset, t_ckpt_dir;
    int t_epochs = -1, t_batch = -1;
    double t_lr = -1, t_wd = -1, t_tau = -1;
    long long t_seed = -1;
    train->add_option("--dataset", t_dataset, "Override data.dataset");
    train->add_option("--checkpoint-dir", t_ckpt_dir, "Override train.checkpoint_dir");
    train->add_option("--epochs", t_epochs, "Override train.epochs");
    train->add_option("--batch-size", t_batch, "Override train.batch_size");
    train->add_option("--lr", t_lr, "Override train.learning_rate");
    train->add_option("--weight-decay", t_wd, "Override train.weight_decay");
    train->add_option("--tau", t_tau, "Override train.tau");
    train->add_option("--seed", t_seed, "Override train.seed");

    // eval
    auto* eval = app.add_subcommand("eval", "Score a MOS dataset and report SRCC/PLCC");
    ModelFlags e_model;
    std::string e_mos, e_pos = "Good photo.", e_neg = "Bad photo.", e_table, e_report, e_svg;
    std::string e_name = "dataset";
    bool e_baseline = false, e_attrs = false, e_remap = false;
    add_model_flags(eval, e_model);
    eval->add_option("--mos", e_mos, "MOS csv")->required();
    eval->add_option("--positive", e_pos, "Positive prompt")->capture_default_str();
    eval->add_option("--negative", e_neg, "Negative prompt")->capture_default_str();
    eval->add_flag("--baseline", e_baseline, "Bypass projectors (vanilla encoder scoring)");
    eval->add_flag("--attributes", e_attrs, "Per-attribute sub-reports from the MOS csv");
    eval->add_flag("--logistic-remap", e_remap, "Fit a logistic remap before PLCC");
    eval->add_option("--prompt-table", e_table, "Attribute prompt table JSON");
    eval->add_option("--dataset-name", e_name, "Name stamped into the report")->capture_default_str();
    eval->add_option("--report", e_report, "Report JSON path");
    eval->add_option("--svg", e_svg, "Scatter SVG path");

    // score
    auto* score = app.add_subcommand("score", "Zero-shot quality score for one image");
    ModelFlags s_model;
    std::string s_image, s_pos = "Good photo.", s_neg = "Bad photo.";
    add_model_flags(score, s_model);
    score->add_option("--image", s_image, "Image ref (path or store key)")->required();
    score->add_option("--positive", s_pos, "Positive prompt")->capture_default_str();
    score->add_option("--negative", s_neg, "Negative prompt")->capture_default_str();

    // attr
    auto* attr = app.add_subcommand("attr", "Zero-shot attribute score for one image");
    ModelFlags a_model;
    std::string a_image, a_attribute, a_table;
    add_model_flags(attr, a_model);
    attr->add_option("--image", a_image, "Image ref")->required();
    attr->add_option("--attribute", a_attribute, "Attribute name")->required();
    attr->add_option("--prompt-table", a_table, "Attribute prompt table JSON");

    // coop
    auto* coop = app.add_subcommand("coop", "Tune prompt context rows on a frozen model");
    ModelFlags c_model;
    std::string c_mos, c_pos = "Good photo.", c_neg = "Bad photo.", c_out = "prompt.json";
    declip::CoopConfig c_config;
    add_model_flags(coop, c_model);
    coop->add_option("--mos", c_mos, "Training MOS csv")->required();
    coop->add_option("--positive", c_pos, "Positive anchor prompt")->capture_default_str();
    coop->add_option("--negative", c_neg, "Negative anchor prompt")->capture_default_str();
    coop->add_option("--m", c_config.m, "Context rows per class")->capture_default_str();
    bool c_shared = false;
    coop->add_flag("--shared-context", c_shared, "One shared context for both classes");
    coop->add_option("--epochs", c_config.epochs, "Tuning epochs")->capture_default_str();
    coop->add_option("--batch-size", c_config.batch_size, "Batch size")->capture_default_str();
    coop->add_option("--lr", c_config.learning_rate, "Learning rate")->capture_default_str();
    coop->add_option("--coop-seed", c_config.seed, "Shuffle seed");
    coop->add_option("--out", c_out, "Prompt vector JSON path")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Generate the synthetic disentanglement benchmark");
    std::uint64_t b_seed = 7;
    int b_items = 512, b_perc = 4, b_sem = 4;
    std::string b_out;
    bench->add_option("--seed", b_seed, "Benchmark seed")->capture_default_str();
    bench->add_option("--items", b_items, "Item count")->capture_default_str();
    bench->add_option("--perc", b_perc, "Blur levels")->capture_default_str();
    bench->add_option("--sem", b_sem, "Shape classes")->capture_default_str();
    bench->add_option("--out", b_out, "Output directory")->required();

    // cond
    auto* cond = app.add_subcommand("cond", "Assemble and export a decoupled condition bundle");
    ModelFlags d_model;
    std::string d_mode, d_image, d_text, d_out;
    add_model_flags(cond, d_model);
    cond->add_option("--mode", d_mode, "perceptual_image_semantic_text or semantic_image_perceptual_text")
        ->required();
    cond->add_option("--image", d_image, "Image ref")->required();
    cond->add_option("--text", d_text, "Complementary text")->required();
    cond->add_option("--out", d_out, "Condition file path")->required();

    // plot
    auto* plot = app.add_subcommand("plot", "Scatter SVG from a report JSON");
    std::string p_report, p_out;
    plot->add_option("--report", p_report, "Report JSON")->required();
    plot->add_option("--out", p_out, "SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (filter->parsed()) return run_filter(f_in, f_vocab, f_min, f_out, f_stats);
        if (relabel->parsed()) return run_relabel(r_in, r_out, r_rejects, r_client, workers);
        if (train->parsed()) {
            require_file(t_config, "config file");
            auto config = declip::RunConfig::from_file(t_config);
            if (!t_dataset.empty()) config.set("data.dataset", t_dataset);
            if (!t_ckpt_dir.empty()) config.set("train.checkpoint_dir", t_ckpt_dir);
            if (t_epochs >= 0) config.set("train.epochs", std::to_string(t_epochs));
            if (t_batch >= 0) config.set("train.batch_size", std::to_string(t_batch));
            if (t_lr >= 0) config.set("train.learning_rate", std::to_string(t_lr));
            if (t_wd >= 0) config.set("train.weight_decay", std::to_string(t_wd));
            if (t_tau >= 0) config.set("train.tau", std::to_string(t_tau));
            if (t_seed >= 0) config.set("train.seed", std::to_string(t_seed));
            return run_train(std::move(config));
        }
        if (eval->parsed())
            return run_eval(e_model, e_mos, e_pos, e_neg, e_baseline, e_attrs, e_remap, e_table, e_name,
                            e_report, e_svg);
        if (score->parsed()) return run_score(s_model, s_image, s_pos, s_neg);
        if (attr->parsed()) return run_attr(a_model, a_image, a_attribute, a_table);
        if (coop->parsed()) {
            c_config.per_class = !c_shared;
            return run_coop(c_model, c_mos, c_pos, c_neg, c_config, c_out);
        }
        if (bench->parsed()) return run_bench(b_seed, b_items, b_perc, b_sem, b_out);
        if (cond->parsed()) return run_cond(d_model, d_mode, d_image, d_text, d_out);
        if (plot->parsed()) return run_plot(p_report, p_out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    } catch (const declip::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitDomain;
    }
    return kExitUsage;
}
