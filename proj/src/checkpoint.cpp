// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "xlproject/errors.hpp"

namespace xlproject::model {
namespace {

using json = nlohmann::ordered_json;

constexpr char kMagic[8] = {'X', 'L', 'P', 'M', 'O', 'D', 'E', 'L'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

void write_doubles(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 4)) throw CorpusError("checkpoint truncated");
    return v;
}

void read_doubles(std::istream& is, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)))) {
        throw CorpusError("checkpoint truncated");
    }
}

json feature_json(const FeatureConfig& f) {
    return {{"bits", f.bits},
            {"salt", f.salt},
            {"window", f.window},
            {"min_ngram", f.min_ngram},
            {"max_ngram", f.max_ngram}};
}

FeatureConfig feature_from(const json& j) {
    FeatureConfig f;
    f.bits = j.at("bits").get<unsigned>();
    f.salt = j.at("salt").get<std::uint64_t>();
    f.window = j.at("window").get<std::size_t>();
    f.min_ngram = j.at("min_ngram").get<std::size_t>();
    f.max_ngram = j.at("max_ngram").get<std::size_t>();
    return f;
}

json header_json(const TrainedModel& m) {
    json h;
    h["features"] = m.base.features();
    h["classes"] = m.base.classes();
    h["task"] = to_string(m.task);
    h["feature_config"] = feature_json(m.config.features);
    if (m.adapter) {
        h["lora"] = {{"r", m.adapter->rank()}, {"alpha", m.adapter->alpha}};
    } else {
        h["lora"] = nullptr;
    }
    json cfg;
    cfg["lr"] = m.config.lr;
    cfg["batch_size"] = m.config.batch_size;
    cfg["epochs"] = m.config.epochs;
    cfg["seed"] = m.config.seed;
    cfg["schedule"] = to_string(m.config.schedule);
    cfg["weight_decay"] = m.config.weight_decay;
    if (m.config.lora) {
        cfg["lora"] = {{"r", m.config.lora->r},
                       {"alpha", m.config.lora->alpha},
                       {"init_stddev", m.config.lora->init_stddev}};
    } else {
        cfg["lora"] = nullptr;
    }
    h["config"] = cfg;
    json hist = json::array();
    for (const auto& e : m.history) {
        json r = {{"epoch", e.epoch}, {"train_loss", e.train_loss}};
        r["validation_metric"] = e.validation_metric ? json(*e.validation_metric) : json(nullptr);
        hist.push_back(r);
    }
    h["history"] = hist;
    h["best_epoch"] = m.best_epoch;
    h["provenance"] = m.provenance;
    return h;
}

}  // namespace

void save_checkpoint(const TrainedModel& m, const std::filesystem::path& path) {
    check_dimensions(m.base, m.adapter ? &*m.adapter : nullptr);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write checkpoint " + path.string());
    const std::string header = header_json(m).dump();
    os.write(kMagic, sizeof kMagic);
    write_u32(os, kCheckpointVersion);
    write_u32(os, static_cast<std::uint32_t>(header.size()));
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    write_doubles(os, m.base.weight.data);
    write_doubles(os, m.base.bias);
    if (m.adapter) {
        write_doubles(os, m.adapter->a.data);
        write_doubles(os, m.adapter->b.data);
    }
    if (!os.flush()) throw IoError("failed writing checkpoint " + path.string());
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read checkpoint " + path.string());
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw CorpusError(path.string() + " is not a model checkpoint");
    }
    const auto version = read_u32(is);
    if (version != kCheckpointVersion) {
        throw CorpusError("unsupported checkpoint version " + std::to_string(version));
    }
    std::string header(read_u32(is), '\0');
    if (!is.read(header.data(), static_cast<std::streamsize>(header.size()))) {
        throw CorpusError("checkpoint truncated");
    }

    TrainedModel m;
    try {
        const auto h = json::parse(header);
        const auto f = h.at("features").get<std::size_t>();
        const auto c = h.at("classes").get<std::size_t>();
        const auto task = parse_task(h.at("task").get<std::string>());
        if (!task) throw CorpusError("checkpoint has unknown task");
        m.task = *task;
        m.config.features = feature_from(h.at("feature_config"));
        if (m.config.features.dim() != f) throw CorpusError("checkpoint feature size mismatch");
        if (num_classes(m.task) != c) throw CorpusError("checkpoint class count mismatch");

        const auto& cfg = h.at("config");
        m.config.lr = cfg.at("lr").get<double>();
        m.config.batch_size = cfg.at("batch_size").get<std::size_t>();
        m.config.epochs = cfg.at("epochs").get<std::size_t>();
        m.config.seed = cfg.at("seed").get<std::uint64_t>();
        const auto schedule = parse_schedule(cfg.at("schedule").get<std::string>());
        if (!schedule) throw CorpusError("checkpoint has unknown schedule");
        m.config.schedule = *schedule;
        m.config.weight_decay = cfg.at("weight_decay").get<double>();
        if (!cfg.at("lora").is_null()) {
            LoraConfig lc;
            lc.r = cfg["lora"].at("r").get<std::size_t>();
            lc.alpha = cfg["lora"].at("alpha").get<double>();
            lc.init_stddev = cfg["lora"].at("init_stddev").get<double>();
            m.config.lora = lc;
        }
        for (const auto& e : h.at("history")) {
            EpochReport r;
            r.epoch = e.at("epoch").get<std::size_t>();
            r.train_loss = e.at("train_loss").get<double>();
            if (!e.at("validation_metric").is_null()) {
                r.validation_metric = e["validation_metric"].get<double>();
            }
            m.history.push_back(r);
        }
        m.best_epoch = h.at("best_epoch").get<std::size_t>();
        m.provenance = h.at("provenance").get<std::map<std::string, std::string>>();

        m.base.weight = Matrix(c, f);
        read_doubles(is, m.base.weight.data, c * f);
        read_doubles(is, m.base.bias, c);
        if (!h.at("lora").is_null()) {
            const auto r = h["lora"].at("r").get<std::size_t>();
            LoraAdapter ad;
            ad.alpha = h["lora"].at("alpha").get<double>();
            ad.a = Matrix(r, f);
            ad.b = Matrix(c, r);
            read_doubles(is, ad.a.data, r * f);
            read_doubles(is, ad.b.data, c * r);
            m.adapter = std::move(ad);
        }
    } catch (const json::exception& e) {
        throw CorpusError(std::string("malformed checkpoint header: ") + e.what());
    }
    if (is.peek() != std::char_traits<char>::eof()) throw CorpusError("trailing bytes in checkpoint");
    return m;
}

}  // namespace xlproject::model
