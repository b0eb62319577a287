// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "xlproject/augment.hpp"
#include "xlproject/checkpoint.hpp"
#include "xlproject/corpus.hpp"
#include "xlproject/errors.hpp"
#include "xlproject/hashing.hpp"
#include "xlproject/llm_response.hpp"
#include "xlproject/metrics.hpp"
#include "xlproject/projection.hpp"
#include "xlproject/trainer.hpp"
#include "xlproject/translate.hpp"
#include "xlproject/unicode.hpp"

namespace xlproject::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Flattened configuration file: nested objects become dotted keys.
class Settings {
  public:
    void load(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("malformed config file " + path.string() + ": " + e.what());
        }
        if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
        flatten(j, "");
    }

    // Flag value if the flag was given, else the file value, else `fallback`.
    template <typename T>
    T pick(const std::string& key, const CLI::Option* flag, const T& flag_value,
           const T& fallback) const {
        if (flag != nullptr && flag->count() > 0) return flag_value;
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return it->second.get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }

    bool has(const std::string& key) const { return values_.contains(key); }

  private:
    void flatten(const json& j, const std::string& prefix) {
        for (const auto& [k, v] : j.items()) {
            const std::string key = prefix.empty() ? k : prefix + "." + k;
            if (v.is_object()) {
                flatten(v, key);
            } else {
                values_[key] = v;
            }
        }
    }

    std::map<std::string, json> values_;
};

struct Common {
    std::string config_path;
    std::string format;
    std::uint64_t seed = 42;
    CLI::Option* format_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON config file; flags override it")
        ->check(CLI::ExistingFile);
    c.format_opt = sub->add_option("--format", c.format, "Corpus format {jsonl,tsv}; default from extension")
                       ->check(CLI::IsMember({"jsonl", "tsv"}));
    c.seed_opt = sub->add_option("--seed", c.seed, "Random seed (default 42)");
}

struct Context {
    Settings settings;
    std::optional<CorpusFormat> format;
    std::uint64_t seed = 42;
};

Context make_context(const Common& c) {
    Context ctx;
    if (!c.config_path.empty()) ctx.settings.load(c.config_path);
    const auto fmt = ctx.settings.pick<std::string>("format", c.format_opt, c.format, "");
    if (!fmt.empty()) {
        ctx.format = parse_corpus_format(fmt);
        if (!ctx.format) throw ConfigError("unknown corpus format '" + fmt + "'");
    }
    ctx.seed = ctx.settings.pick<std::uint64_t>("seed", c.seed_opt, c.seed, 42);
    return ctx;
}

CorpusFormat format_for(const Context& ctx, const fs::path& path) {
    if (ctx.format) return *ctx.format;
    return path.extension() == ".tsv" ? CorpusFormat::Tsv : CorpusFormat::Jsonl;
}

std::string extension(CorpusFormat f) { return f == CorpusFormat::Tsv ? ".tsv" : ".jsonl"; }

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

void require_path(const std::string& value, const char* flag) {
    if (value.empty()) throw ConfigError(std::string("missing required ") + flag);
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& path, const std::string& content) {
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os || !os.write(content.data(), static_cast<std::streamsize>(content.size())) || !os.flush()) {
        throw IoError("cannot write " + path.string());
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        auto piece = std::string(unicode::trim(std::string_view(text).substr(start, end - start)));
        if (!piece.empty()) out.push_back(piece);
        start = end + 1;
    }
    return out;
}

std::string input_hash(const fs::path& p) {
    if (!fs::exists(p)) throw IoError("input file not found: " + p.string());
    return sha256_file_hex(p);
}

// Replaces the per-run provenance keys left by earlier commands.
void stamp(std::map<std::string, std::string>& prov, const std::string& command,
           const json& resolved, std::uint64_t seed,
           const std::vector<std::pair<std::string, fs::path>>& inputs) {
    for (auto it = prov.begin(); it != prov.end();) {
        if (it->first == "command" || it->first == "config_sha256" || it->first == "seed" ||
            it->first.rfind("input_sha256.", 0) == 0) {
            it = prov.erase(it);
        } else {
            ++it;
        }
    }
    prov["command"] = command;
    prov["config_sha256"] = sha256_hex(resolved.dump());
    prov["seed"] = std::to_string(seed);
    for (const auto& [role, path] : inputs) prov["input_sha256." + role] = input_hash(path);
}

Corpus read_corpus(const Context& ctx, const fs::path& path) {
    if (!fs::exists(path)) throw IoError("input file not found: " + path.string());
    return load_corpus(path, format_for(ctx, path));
}

void write_corpus(const Context& ctx, const Corpus& corpus, const fs::path& path) {
    ensure_parent(path);
    save_corpus(corpus, path, format_for(ctx, path));
}

// ---- split ---------------------------------------------------------------

struct SplitArgs {
    Common common;
    std::string input;
    std::string output;
    double fraction = 0.10;
    CLI::Option* fraction_opt = nullptr;
};

void cmd_split(const SplitArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    const double fraction = ctx.settings.pick("fraction", a.fraction_opt, a.fraction, 0.10);
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    auto corpus = read_corpus(ctx, a.input);
    auto [train, validation] = split_train_validation(corpus, fraction, ctx.seed);

    const json resolved = {{"command", "split"}, {"fraction", fraction}, {"seed", ctx.seed}};
    const auto fmt = format_for(ctx, a.input);
    const fs::path dir(a.output);
    fs::create_directories(dir);
    for (auto* part : {&train, &validation}) {
        stamp(part->provenance, "split", resolved, ctx.seed, {{"input", a.input}});
    }
    Context out_ctx = ctx;
    out_ctx.format = fmt;
    write_corpus(out_ctx, train, dir / ("train" + extension(fmt)));
    write_corpus(out_ctx, validation, dir / ("validation" + extension(fmt)));
    out << "train " << train.size() << " validation " << validation.size() << "\n";
}

// ---- project -------------------------------------------------------------

struct ProjectArgs {
    Common common;
    std::string input;
    std::string output;
    std::string backend = "identity";
    std::string src = "en";
    std::string tgt = "es,fr,nl,ru";
    std::string scheme;
    std::string cache;
    std::string dictionary;
    std::string endpoint;
    std::size_t parallelism = 4;
    std::size_t drop_markers = 0;
    CLI::Option *backend_opt = nullptr, *src_opt = nullptr, *tgt_opt = nullptr, *scheme_opt = nullptr,
                *cache_opt = nullptr, *dict_opt = nullptr, *endpoint_opt = nullptr,
                *parallelism_opt = nullptr, *drop_opt = nullptr;
};

std::shared_ptr<translate::TranslationBackend> make_backend(const std::string& kind,
                                                            const std::string& dictionary,
                                                            const std::string& endpoint) {
    if (kind == "identity") return std::make_shared<translate::IdentityBackend>();
    if (kind == "mock") {
        if (dictionary.empty()) throw ConfigError("--backend mock needs --dict (or mt.dictionary)");
        return std::make_shared<translate::DictionaryBackend>(
            translate::DictionaryBackend::load(dictionary));
    }
    if (kind == "remote") {
        if (endpoint.empty()) throw ConfigError("--backend remote needs --endpoint (or mt.endpoint)");
        const char* key = std::getenv("XLPROJECT_MT_API_KEY");
        return std::make_shared<translate::RemoteHttpBackend>(endpoint, key ? key : "");
    }
    throw ConfigError("unknown backend '" + kind + "'");
}

void cmd_project(const ProjectArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    const auto& s = ctx.settings;
    const auto backend_kind = s.pick("mt.backend", a.backend_opt, a.backend, std::string("identity"));
    const auto src = s.pick("src", a.src_opt, a.src, std::string("en"));
    const auto tgt = s.pick("tgt", a.tgt_opt, a.tgt, std::string("es,fr,nl,ru"));
    const auto scheme_text = s.pick("projection.scheme", a.scheme_opt, a.scheme, std::string());
    const auto cache_dir = s.pick("mt.cache", a.cache_opt, a.cache, std::string(".xlproject-cache"));
    const auto dictionary = s.pick("mt.dictionary", a.dict_opt, a.dictionary, std::string());
    const auto endpoint = s.pick("mt.endpoint", a.endpoint_opt, a.endpoint, std::string());
    const auto parallelism = s.pick<std::size_t>("mt.parallelism", a.parallelism_opt, a.parallelism, 4);
    const auto drop = s.pick<std::size_t>("mt.drop_markers", a.drop_opt, a.drop_markers, 0);
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    if (parallelism == 0) throw ConfigError("mt.parallelism must be positive");

    const auto scheme = scheme_text.empty() ? projection::MarkerScheme::default_scheme()
                                            : projection::MarkerScheme::parse(scheme_text);
    auto backend = make_backend(backend_kind, dictionary, endpoint);
    if (drop > 0) {
        backend = std::make_shared<translate::MarkerDroppingBackend>(
            backend, scheme.symbols(), translate::MarkerDroppingBackend::every_nth_by_hash(drop));
    }
    const auto targets = split_list(tgt);
    if (targets.empty()) throw ConfigError("--tgt lists no languages");
    for (const auto& t : targets) {
        if (!is_supported_language(t)) throw ConfigError("unsupported target language '" + t + "'");
        if (t == src) throw ConfigError("target language equals source language '" + t + "'");
    }

    const auto source = read_corpus(ctx, a.input);
    translate::TranslationCache cache(cache_dir);
    projection::ProjectionOptions opts;
    opts.source_lang = src;
    opts.target_langs = targets;
    opts.batch.parallelism = parallelism;
    auto run = projection::project_corpus(source, scheme, *backend, cache, opts);

    json resolved = {{"command", "project"},   {"backend", backend->id()}, {"src", src},
                     {"tgt", targets},         {"scheme", scheme.to_string()},
                     {"drop_markers", drop},   {"seed", ctx.seed}};
    stamp(run.target.provenance, "project", resolved, ctx.seed, {{"input", a.input}});
    const fs::path output(a.output);
    write_corpus(ctx, run.target, output);
    projection::save_discards(run.discards, with_suffix(output, ".discards.jsonl"));
    projection::save_alignments(run.alignments, with_suffix(output, ".alignments.jsonl"));
    out << "projected " << run.target.size() << " discarded " << run.discards.size() << "\n";
}

// ---- switch --------------------------------------------------------------

struct SwitchArgs {
    Common common;
    std::string input;
    std::string target;
    std::string alignments;
    std::string output;
};

void cmd_switch(const SwitchArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    require_path(a.input, "--input");
    require_path(a.target, "--target");
    require_path(a.output, "--output");
    const fs::path align_path =
        a.alignments.empty() ? with_suffix(a.target, ".alignments.jsonl") : fs::path(a.alignments);
    const auto source = read_corpus(ctx, a.input);
    const auto target = read_corpus(ctx, a.target);
    if (!fs::exists(align_path)) throw IoError("alignment file not found: " + align_path.string());
    const auto alignments = projection::load_alignments(align_path);
    auto [st, ts] = augment::build_switched_corpora(source, target, alignments);

    const json resolved = {{"command", "switch"}, {"seed", ctx.seed}};
    const std::vector<std::pair<std::string, fs::path>> inputs = {
        {"source", a.input}, {"target", a.target}, {"alignments", align_path}};
    stamp(st.provenance, "switch", resolved, ctx.seed, inputs);
    stamp(ts.provenance, "switch", resolved, ctx.seed, inputs);
    const fs::path dir(a.output);
    fs::create_directories(dir);
    const auto fmt = format_for(ctx, a.target);
    Context out_ctx = ctx;
    out_ctx.format = fmt;
    write_corpus(out_ctx, st, dir / ("D_St" + extension(fmt)));
    write_corpus(out_ctx, ts, dir / ("D_Ts" + extension(fmt)));
    out << "D_St " << st.size() << " D_Ts " << ts.size() << "\n";
}

// ---- combine -------------------------------------------------------------

struct CombineArgs {
    Common common;
    std::vector<std::string> inputs;
    std::string combine = "D_S+D_T+D_St+D_Ts";
    std::string output;
    CLI::Option* combine_opt = nullptr;
};

void cmd_combine(const CombineArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    const auto spec_text =
        ctx.settings.pick("combine", a.combine_opt, a.combine, std::string("D_S+D_T+D_St+D_Ts"));
    require_path(a.output, "--output");
    const auto spec = augment::CombinationSpec::parse(spec_text);
    std::map<DatasetTag, Corpus> corpora;
    std::vector<std::pair<std::string, fs::path>> hashed;
    for (const auto& item : a.inputs) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--input expects TAG=path, got '" + item + "'");
        const auto tag = parse_dataset_tag(item.substr(0, eq));
        if (!tag) throw ConfigError("unknown dataset tag in '" + item + "'");
        if (corpora.contains(*tag)) throw ConfigError("dataset tag given twice: " + item.substr(0, eq));
        const fs::path path = item.substr(eq + 1);
        if (!spec.contains(*tag)) continue;
        corpora[*tag] = read_corpus(ctx, path);
        hashed.emplace_back(std::string(to_string(*tag)), path);
    }
    auto combined = augment::build_dataset(spec, corpora);
    const json resolved = {{"command", "combine"}, {"combine", spec.to_string()}, {"seed", ctx.seed}};
    stamp(combined.provenance, "combine", resolved, ctx.seed, hashed);
    write_corpus(ctx, combined, a.output);
    out << "combined " << combined.size() << " sentences (" << spec.to_string() << ")\n";
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string input;
    std::string validation;
    std::string output;
    std::string base;
    std::string task;
    double lr = 2e-4;
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    std::size_t lora_r = 64;
    double lora_alpha = 16.0;
    std::string schedule = "linear";
    unsigned feature_bits = 18;
    double weight_decay = 0.0;
    CLI::Option *task_opt = nullptr, *lr_opt = nullptr, *epochs_opt = nullptr, *batch_opt = nullptr,
                *lora_r_opt = nullptr, *lora_alpha_opt = nullptr, *schedule_opt = nullptr,
                *bits_opt = nullptr, *wd_opt = nullptr;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    const auto& s = ctx.settings;
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    const auto task_text = s.pick("train.task", a.task_opt, a.task, std::string());
    const auto task = model::parse_task(task_text);
    if (!task) throw ConfigError("--task must be emotion or trigger");

    model::TrainConfig cfg;
    cfg.seed = ctx.seed;
    cfg.lr = s.pick("train.lr", a.lr_opt, a.lr, 2e-4);
    cfg.batch_size = s.pick<std::size_t>("train.batch_size", a.batch_opt, a.batch_size, 16);
    const bool use_lora = (a.lora_r_opt->count() > 0) || s.has("train.lora_r");
    if (use_lora) {
        model::LoraConfig lc;
        lc.r = s.pick<std::size_t>("train.lora_r", a.lora_r_opt, a.lora_r, 64);
        lc.alpha = s.pick("train.lora_alpha", a.lora_alpha_opt, a.lora_alpha, 16.0);
        cfg.lora = lc;
    } else if (a.lora_alpha_opt->count() > 0) {
        throw ConfigError("--lora-alpha needs --lora-r");
    }
    cfg.epochs = s.pick<std::size_t>("train.epochs", a.epochs_opt, a.epochs,
                                      use_lora ? model::kMaxAdapterEpochs : model::kMaxEpochs);
    const auto schedule = model::parse_schedule(
        s.pick("train.schedule", a.schedule_opt, a.schedule, std::string("linear")));
    if (!schedule) throw ConfigError("--schedule must be constant or linear");
    cfg.schedule = *schedule;
    cfg.features.bits = s.pick<unsigned>("train.feature_bits", a.bits_opt, a.feature_bits, 18);
    cfg.weight_decay = s.pick("train.weight_decay", a.wd_opt, a.weight_decay, 0.0);
    cfg.validate();

    const auto corpus = read_corpus(ctx, a.input);
    std::optional<Corpus> validation;
    if (!a.validation.empty()) validation = read_corpus(ctx, a.validation);
    std::optional<model::LinearModel> base;
    if (!a.base.empty()) {
        const auto b = model::load_checkpoint(a.base);
        if (b.task != *task) throw ConfigError("--base checkpoint was trained for another task");
        if (!(b.config.features == cfg.features)) {
            throw ConfigError("--base checkpoint uses a different feature space");
        }
        base = b.effective();
    }

    auto trained = model::train(corpus, *task, cfg, validation ? &*validation : nullptr,
                                base ? &*base : nullptr);
    for (const auto& e : trained.history) {
        out << "epoch " << e.epoch << " loss " << e.train_loss;
        if (e.validation_metric) out << " validation " << *e.validation_metric;
        out << "\n";
    }
    out << "best epoch " << trained.best_epoch << "\n";

    json resolved = {{"command", "train"},
                     {"task", model::to_string(*task)},
                     {"lr", cfg.lr},
                     {"batch_size", cfg.batch_size},
                     {"epochs", cfg.epochs},
                     {"schedule", model::to_string(cfg.schedule)},
                     {"feature_bits", cfg.features.bits},
                     {"weight_decay", cfg.weight_decay},
                     {"seed", cfg.seed}};
    resolved["lora"] = cfg.lora ? json{{"r", cfg.lora->r}, {"alpha", cfg.lora->alpha}} : json(nullptr);
    std::vector<std::pair<std::string, fs::path>> inputs = {{"input", a.input}};
    if (!a.validation.empty()) inputs.emplace_back("validation", a.validation);
    if (!a.base.empty()) inputs.emplace_back("base", a.base);
    stamp(trained.provenance, "train", resolved, cfg.seed, inputs);
    ensure_parent(a.output);
    model::save_checkpoint(trained, a.output);
}

// ---- predict -------------------------------------------------------------

struct PredictArgs {
    Common common;
    std::string model;
    std::string input;
    std::string output;
};

void cmd_predict(const PredictArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    require_path(a.model, "--model");
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    const auto trained = model::load_checkpoint(a.model);
    const auto corpus = read_corpus(ctx, a.input);
    std::vector<std::vector<double>> numeric;
    auto predicted = model::predict_corpus(trained, corpus, &numeric);

    const json resolved = {{"command", "predict"}, {"task", model::to_string(trained.task)}, {"seed", ctx.seed}};
    stamp(predicted.provenance, "predict", resolved, ctx.seed, {{"model", a.model}, {"input", a.input}});
    write_corpus(ctx, predicted, a.output);
    if (trained.task == model::Task::Trigger) {
        std::string lines;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            json row = {{"id", predicted.sentences[i].id}, {"numeric", numeric[i]}};
            lines += row.dump() + "\n";
        }
        write_text(with_suffix(a.output, ".numeric.jsonl"), lines);
    }
    out << "predicted " << predicted.size() << " sentences\n";
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
    Common common;
    std::string gold;
    std::string input;
    std::string labels;
    std::string attributions;
    std::string output;
    std::string confusion_csv;
};

std::unordered_map<std::string, std::vector<double>> load_numeric(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open attributions " + path.string());
    std::unordered_map<std::string, std::vector<double>> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (unicode::trim(line).empty()) continue;
        try {
            const auto j = json::parse(line);
            out[j.at("id").get<std::string>()] = j.at("numeric").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw CorpusError("malformed attributions at line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_two_columns(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw CorpusError("line " + std::to_string(n) + " of " + path.string() + " has no tab");
        }
        rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return rows;
}

json scores_json(const metrics::ClassScores& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
            {"support", s.support},     {"predicted", s.predicted}};
}

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    require_path(a.gold, "--gold");
    if (a.input.empty() == a.labels.empty()) {
        throw ConfigError("give exactly one of --input (predicted corpus) or --labels (id/label TSV)");
    }
    const auto gold = read_corpus(ctx, a.gold);
    if (gold.empty()) throw CorpusError("gold corpus is empty");

    std::unordered_map<std::string, const AnnotatedSentence*> pred_by_id;
    std::unordered_map<std::string, EmotionLabel> label_by_id;
    Corpus predicted;
    if (!a.input.empty()) {
        predicted = read_corpus(ctx, a.input);
        for (const auto& s : predicted.sentences) pred_by_id[s.id] = &s;
    } else {
        for (const auto& [id, text] : read_two_columns(a.labels)) {
            const auto l = parse_emotion(text);
            if (!l) throw CorpusError("unknown emotion '" + text + "' for id " + id);
            label_by_id[id] = *l;
        }
    }
    std::optional<std::unordered_map<std::string, std::vector<double>>> numeric;
    if (!a.attributions.empty()) numeric = load_numeric(a.attributions);

    std::vector<EmotionLabel> gold_labels;
    std::vector<EmotionLabel> pred_labels;
    std::vector<std::pair<metrics::Mask, metrics::Mask>> mask_pairs;
    std::vector<std::pair<metrics::Mask, std::vector<double>>> importance;
    bool emotion_ok = true;
    bool mask_ok = true;
    for (const auto& g : gold.sentences) {
        std::optional<EmotionLabel> pe;
        const AnnotatedSentence* p = nullptr;
        if (!a.input.empty()) {
            auto it = pred_by_id.find(g.id);
            if (it == pred_by_id.end()) throw CorpusError("no prediction for gold id '" + g.id + "'");
            p = it->second;
            if (p->tokens.size() != g.tokens.size()) {
                throw CorpusError("prediction for '" + g.id + "' has a different token count");
            }
            pe = p->emotion;
        } else {
            auto it = label_by_id.find(g.id);
            if (it == label_by_id.end()) throw CorpusError("no label for gold id '" + g.id + "'");
            pe = it->second;
        }
        if (g.emotion && pe) {
            gold_labels.push_back(*g.emotion);
            pred_labels.push_back(*pe);
        } else {
            emotion_ok = false;
        }
        if (g.trigger_mask && p && p->trigger_mask) {
            mask_pairs.emplace_back(*g.trigger_mask, *p->trigger_mask);
        } else {
            mask_ok = false;
        }
        if (numeric && g.trigger_mask) {
            auto it = numeric->find(g.id);
            if (it == numeric->end()) throw CorpusError("no attributions for gold id '" + g.id + "'");
            importance.emplace_back(*g.trigger_mask, it->second);
        }
    }

    metrics::MetricsReport r;
    if (emotion_ok) {
        r.macro_f1 = metrics::macro_f1(gold_labels, pred_labels);
        r.per_class = metrics::per_class_scores(gold_labels, pred_labels);
        r.confusion = metrics::confusion_matrix(gold_labels, pred_labels);
        r.emotion_instances = gold_labels.size();
    }
    if (mask_ok) {
        r.token_f1 = metrics::corpus_token_f1(mask_pairs);
        r.token_instances = mask_pairs.size();
    }
    std::size_t importance_scored = 0;
    if (numeric) {
        const auto acc = metrics::corpus_accumulated_importance(importance);
        r.accumulated_importance = acc.mean;
        r.skipped_no_trigger = acc.skipped_no_trigger;
        importance_scored = acc.scored;
    }
    if (!r.macro_f1 && !r.token_f1 && !numeric) {
        throw CorpusError("nothing to score: gold and predictions share no emotion labels or masks");
    }

    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json report;
    report["macro_f1"] = opt(r.macro_f1);
    report["token_f1"] = opt(r.token_f1);
    report["accumulated_importance"] = opt(r.accumulated_importance);
    if (r.per_class) {
        json pc = json::object();
        for (auto l : kAllEmotions) pc[std::string(to_string(l))] = scores_json((*r.per_class)[static_cast<std::size_t>(l)]);
        report["per_class"] = pc;
    } else {
        report["per_class"] = nullptr;
    }
    if (r.confusion) {
        json rows = json::array();
        for (const auto& row : r.confusion->counts) rows.push_back(row);
        report["confusion"] = rows;
    } else {
        report["confusion"] = nullptr;
    }
    report["skipped_no_trigger"] = r.skipped_no_trigger;
    report["instances"] = {{"emotion", r.emotion_instances},
                           {"token", r.token_instances},
                           {"importance_scored", importance_scored}};
    report["conventions"] = {
        {"token_f1_both_empty", 1.0},
        {"token_f1_one_empty", 0.0},
        {"macro_f1_absent_classes", "excluded"},
        {"importance_without_gold_trigger", "excluded"},
    };

    std::map<std::string, std::string> prov;
    std::vector<std::pair<std::string, fs::path>> inputs = {{"gold", a.gold}};
    if (!a.input.empty()) inputs.emplace_back("predictions", a.input);
    if (!a.labels.empty()) inputs.emplace_back("labels", a.labels);
    if (!a.attributions.empty()) inputs.emplace_back("attributions", a.attributions);
    stamp(prov, "evaluate", json{{"command", "evaluate"}, {"seed", ctx.seed}}, ctx.seed, inputs);
    report["provenance"] = prov;

    const std::string text = report.dump(2) + "\n";
    if (a.output.empty()) {
        out << text;
    } else {
        write_text(a.output, text);
        out << "macro_f1 " << opt(r.macro_f1).dump() << " token_f1 " << opt(r.token_f1).dump()
            << " accumulated_importance " << opt(r.accumulated_importance).dump() << "\n";
    }
    if (!a.confusion_csv.empty()) {
        if (!r.confusion) throw CorpusError("no emotion labels to build a confusion matrix from");
        write_text(a.confusion_csv, r.confusion->to_csv());
    }
}

// ---- parse-llm -----------------------------------------------------------

struct ParseLlmArgs {
    Common common;
    std::string input;
    std::string output;
    bool fallback_neutral = false;
};

void cmd_parse_llm(const ParseLlmArgs& a, std::ostream& out) {
    const auto ctx = make_context(a.common);
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    std::string labels;
    std::string errors;
    std::size_t failed = 0;
    const auto rows = read_two_columns(a.input);
    for (const auto& [id, response] : rows) {
        try {
            labels += id + "\t" + std::string(to_string(parse_llm_response(response))) + "\n";
        } catch (const LlmParseError& e) {
            ++failed;
            errors += id + "\t" + e.what() + "\n";
            if (a.fallback_neutral) labels += id + "\tNeutral\n";
        }
    }
    write_text(a.output, labels);
    write_text(with_suffix(a.output, ".errors.tsv"), errors);
    out << "parsed " << rows.size() - failed << " of " << rows.size();
    if (failed) out << (a.fallback_neutral ? " (failures mapped to Neutral)" : " (failures omitted)");
    out << "\n";
}

constexpr const char* kFooter =
    "Exit codes: 0 ok, 2 configuration error, 3 data error (missing or malformed input),\n"
    "4 translation backend error, 5 internal error.\n"
    "Environment: XLPROJECT_MT_API_KEY is sent to the remote translation backend.";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Cross-lingual emotion and trigger-word toolkit", "xlproject");
    app.footer(kFooter);
    app.require_subcommand(1);

    SplitArgs split;
    auto* sp = app.add_subcommand("split", "Split a corpus into train and validation parts");
    add_common(sp, split.common);
    sp->add_option("--input", split.input, "Corpus to split");
    sp->add_option("--output", split.output, "Output directory (train.* and validation.*)");
    split.fraction_opt = sp->add_option("--fraction", split.fraction, "Validation fraction (default 0.10)");

    ProjectArgs proj;
    auto* pp = app.add_subcommand("project", "Translate a corpus and project trigger labels");
    add_common(pp, proj.common);
    pp->add_option("--input", proj.input, "English source corpus (D_S)");
    pp->add_option("--output", proj.output, "Projected corpus (D_T); sidecars get .discards.jsonl / .alignments.jsonl");
    proj.backend_opt = pp->add_option("--backend", proj.backend, "identity, mock or remote")
                           ->check(CLI::IsMember({"identity", "mock", "remote"}));
    proj.src_opt = pp->add_option("--src", proj.src, "Source language (default en)");
    proj.tgt_opt = pp->add_option("--tgt", proj.tgt, "Comma-separated target languages (default es,fr,nl,ru)");
    proj.scheme_opt = pp->add_option("--scheme", proj.scheme, "Marker pairs, e.g. \"[] {} <>\"");
    proj.cache_opt = pp->add_option("--cache", proj.cache, "Translation cache directory (default .xlproject-cache)");
    proj.dict_opt = pp->add_option("--dict", proj.dictionary, "Dictionary JSON for the mock backend");
    proj.endpoint_opt = pp->add_option("--endpoint", proj.endpoint, "URL of the remote backend");
    proj.parallelism_opt = pp->add_option("--parallelism", proj.parallelism, "Concurrent backend calls (default 4)");
    proj.drop_opt = pp->add_option("--drop-markers", proj.drop_markers,
                                   "Strip markers from about one in N translations (testing)");

    SwitchArgs sw;
    auto* ws = app.add_subcommand("switch", "Build D_St and D_Ts by swapping trigger spans");
    add_common(ws, sw.common);
    ws->add_option("--input", sw.input, "English source corpus (D_S)");
    ws->add_option("--target", sw.target, "Projected corpus (D_T)");
    ws->add_option("--alignments", sw.alignments, "Alignment sidecar (default <target>.alignments.jsonl)");
    ws->add_option("--output", sw.output, "Output directory (D_St.*, D_Ts.*)");

    CombineArgs comb;
    auto* cp = app.add_subcommand("combine", "Concatenate dataset parts into a training set");
    add_common(cp, comb.common);
    cp->add_option("--input", comb.inputs, "TAG=path, repeatable (TAG in D_S, D_T, D_St, D_Ts)");
    comb.combine_opt = cp->add_option("--combine", comb.combine, "Combination, e.g. D_S+D_T");
    cp->add_option("--output", comb.output, "Combined corpus");

    TrainArgs tr;
    auto* tp = app.add_subcommand("train", "Train a classifier head and write a checkpoint");
    add_common(tp, tr.common);
    tp->add_option("--input", tr.input, "Training corpus");
    tp->add_option("--validation", tr.validation, "Validation corpus for epoch selection");
    tp->add_option("--output", tr.output, "Checkpoint path");
    tp->add_option("--base", tr.base, "Checkpoint whose weights become the frozen/initial W0");
    tr.task_opt = tp->add_option("--task", tr.task, "emotion or trigger")->check(CLI::IsMember({"emotion", "trigger"}));
    tr.lr_opt = tp->add_option("--lr", tr.lr, "Learning rate: 2e-6, 2e-5, 5e-5 or 2e-4 (default 2e-4)");
    tr.epochs_opt = tp->add_option("--epochs", tr.epochs, "Epochs (default 30, 5 with LoRA)");
    tr.batch_opt = tp->add_option("--batch-size", tr.batch_size, "Sentences per step (default 16)");
    tr.lora_r_opt = tp->add_option("--lora-r", tr.lora_r, "Train a LoRA adapter of this rank");
    tr.lora_alpha_opt = tp->add_option("--lora-alpha", tr.lora_alpha, "LoRA alpha (default 16)");
    tr.schedule_opt = tp->add_option("--schedule", tr.schedule, "constant or linear (default linear)")
                          ->check(CLI::IsMember({"constant", "linear"}));
    tr.bits_opt = tp->add_option("--feature-bits", tr.feature_bits, "Hashed feature space is 2^bits (default 18)");
    tr.wd_opt = tp->add_option("--weight-decay", tr.weight_decay, "AdamW weight decay (default 0)");

    PredictArgs pr;
    auto* pdp = app.add_subcommand("predict", "Label a corpus with a trained checkpoint");
    add_common(pdp, pr.common);
    pdp->add_option("--model", pr.model, "Checkpoint");
    pdp->add_option("--input", pr.input, "Corpus to label");
    pdp->add_option("--output", pr.output, "Predicted corpus; trigger runs also write <output>.numeric.jsonl");

    EvaluateArgs ev;
    auto* ep = app.add_subcommand("evaluate", "Score predictions against a gold corpus");
    add_common(ep, ev.common);
    ep->add_option("--gold", ev.gold, "Gold corpus");
    ep->add_option("--input", ev.input, "Predicted corpus");
    ep->add_option("--labels", ev.labels, "id<TAB>label file, e.g. from parse-llm");
    ep->add_option("--attributions", ev.attributions, "Numeric attributions (<predictions>.numeric.jsonl)");
    ep->add_option("--output", ev.output, "Report JSON (stdout when omitted)");
    ep->add_option("--confusion-csv", ev.confusion_csv, "Also write the confusion matrix as CSV");

    ParseLlmArgs pl;
    auto* lp = app.add_subcommand("parse-llm", "Turn raw LLM answers into emotion labels");
    add_common(lp, pl.common);
    lp->add_option("--input", pl.input, "id<TAB>response file");
    lp->add_option("--output", pl.output, "id<TAB>label file; errors go to <output>.errors.tsv");
    lp->add_flag("--fallback-neutral", pl.fallback_neutral, "Label unparseable responses Neutral");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sp->parsed()) cmd_split(split, out);
        if (pp->parsed()) cmd_project(proj, out);
        if (ws->parsed()) cmd_switch(sw, out);
        if (cp->parsed()) cmd_combine(comb, out);
        if (tp->parsed()) cmd_train(tr, out);
        if (pdp->parsed()) cmd_predict(pr, out);
        if (ep->parsed()) cmd_evaluate(ev, out);
        if (lp->parsed()) cmd_parse_llm(pl, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const augment::SwitchError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const CorpusError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const IoError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const BackendError& e) {
        err << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace xlproject::cli
