// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#include "xlproject/translate.hpp"

#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "xlproject/hashing.hpp"
#include "xlproject/unicode.hpp"

#include "httplib.h"

namespace xlproject::translate {

using json = nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

void append_field(std::string& buf, std::string_view field) {
    buf += std::to_string(field.size());
    buf += ':';
    buf += field;
    buf += ';';
}

std::string dictionary_id(const DictionaryBackend::Dictionary& dict) {
    const json j = dict;
    return "dictionary:" + sha256_hex(j.dump()).substr(0, 16);
}

}  // namespace

// -- backends ---------------------------------------------------------------

DictionaryBackend::DictionaryBackend(Dictionary dict)
    : dict_(std::move(dict)), id_(dictionary_id(dict_)) {}

DictionaryBackend::Dictionary DictionaryBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dictionary " + path.string());
    Dictionary dict;
    try {
        const json j = json::parse(in);
        dict = j.get<Dictionary>();
    } catch (const json::exception& e) {
        throw ConfigError("malformed dictionary " + path.string() + ": " + e.what());
    }
    return dict;
}

std::string DictionaryBackend::translate(const std::string& text, const std::string&,
                                         const std::string& tgt) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    auto words = unicode::split_whitespace(text);
    auto table = dict_.find(tgt);
    if (table == dict_.end()) return join(words);
    for (auto& w : words) {
        auto it = table->second.find(w);
        if (it == table->second.end()) it = table->second.find(unicode::ascii_lower(w));
        if (it != table->second.end()) w = it->second;
    }
    return join(words);
}

MarkerDroppingBackend::MarkerDroppingBackend(std::shared_ptr<TranslationBackend> inner,
                                             std::vector<std::string> symbols,
                                             Predicate affects)
    : inner_(std::move(inner)), symbols_(std::move(symbols)), affects_(std::move(affects)) {}

MarkerDroppingBackend::Predicate MarkerDroppingBackend::every_nth_by_hash(std::size_t every) {
    if (every == 0) return [](const std::string&) { return false; };
    return [every](const std::string& text) { return hash64(text, 0x5eed) % every == 0; };
}

std::string MarkerDroppingBackend::id() const {
    std::string syms;
    for (const auto& s : symbols_) append_field(syms, s);
    return inner_->id() + "|drop-markers:" + sha256_hex(syms).substr(0, 8);
}

std::string MarkerDroppingBackend::translate(const std::string& text, const std::string& src,
                                             const std::string& tgt) {
    std::string out = inner_->translate(text, src, tgt);
    if (!affects_(text)) return out;
    for (const auto& sym : symbols_) {
        for (auto pos = out.find(sym); pos != std::string::npos; pos = out.find(sym, pos)) {
            out.erase(pos, sym.size());
        }
    }
    return join(unicode::split_whitespace(out));
}

RemoteHttpBackend::RemoteHttpBackend(std::string endpoint, std::string api_key,
                                     std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {
    if (endpoint_.rfind("http://", 0) != 0 && endpoint_.rfind("https://", 0) != 0) {
        throw ConfigError("mt.endpoint must be an http(s) URL: '" + endpoint_ + "'");
    }
}

std::string RemoteHttpBackend::translate(const std::string& text, const std::string& src,
                                         const std::string& tgt) {
    const auto scheme_end = endpoint_.find("://") + 3;
    const auto path_start = endpoint_.find('/', scheme_end);
    const std::string base = endpoint_.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    httplib::Client client(base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());

    json body = {{"q", text}, {"source", src}, {"target", tgt}};
    if (!api_key_.empty()) body["api_key"] = api_key_;

    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw BackendError("request to " + endpoint_ + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw BackendError("request to " + endpoint_ + " returned HTTP " + std::to_string(res->status));
    }
    try {
        const json reply = json::parse(res->body);
        return reply.at("translatedText").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("unexpected response body: ") + e.what());
    }
}

// -- cache ------------------------------------------------------------------

std::string cache_key(std::string_view text, std::string_view src, std::string_view tgt,
                      std::string_view backend_id) {
    std::string buf = "xlproject-mt-v1;";
    append_field(buf, backend_id);
    append_field(buf, src);
    append_field(buf, tgt);
    append_field(buf, text);
    return sha256_hex(buf);
}

TranslationCache::TranslationCache(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError("cannot create cache directory " + root_.string() + ": " + ec.message());
}

std::filesystem::path TranslationCache::entry_path(std::string_view key) const {
    return root_ / std::string(key.substr(0, 2)) / (std::string(key) + ".json");
}

std::optional<CacheEntry> TranslationCache::lookup(const std::string& key) const {
    const auto path = entry_path(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const json j = json::parse(in);
        CacheEntry e;
        e.key = key;
        e.text = j.at("text").get<std::string>();
        e.translated = j.at("translated").get<std::string>();
        e.src = j.at("src").get<std::string>();
        e.tgt = j.at("tgt").get<std::string>();
        e.backend = j.at("backend").get<std::string>();
        e.created_at = std::filesystem::last_write_time(path);
        return e;
    } catch (const std::exception&) {
        // A torn or foreign file is treated as a miss; store() will not
        // overwrite it, so this only costs a backend call.
        return std::nullopt;
    }
}

CacheEntry TranslationCache::store(const CacheEntry& entry) {
    std::lock_guard lock(mutex_);
    if (auto existing = lookup(entry.key)) return *existing;

    const auto final_path = entry_path(entry.key);
    std::filesystem::create_directories(final_path.parent_path());

    static std::atomic<std::uint64_t> counter{0};
    auto tmp = final_path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));

    const json j = {{"text", entry.text},         {"translated", entry.translated},
                    {"src", entry.src},           {"tgt", entry.tgt},
                    {"backend", entry.backend}};
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write cache entry " + tmp.string());
        out << j.dump() << '\n';
        if (!out.flush()) throw IoError("cannot write cache entry " + tmp.string());
    }
    // link(2) never replaces an existing file, so concurrent writers from
    // other processes cannot clobber the first value.
    const int rc = ::link(tmp.c_str(), final_path.c_str());
    const int err = errno;
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    if (rc != 0 && err != EEXIST) {
        throw IoError("cannot publish cache entry " + final_path.string() + ": " + std::strerror(err));
    }
    if (auto stored = lookup(entry.key)) return *stored;
    throw IoError("unreadable cache entry " + final_path.string());
}

// -- batch ------------------------------------------------------------------

std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                         const std::string& src, const std::string& tgt,
                                         TranslationBackend& backend, TranslationCache& cache,
                                         const BatchOptions& options) {
    if (src == tgt) throw ConfigError("source and target language are both '" + src + "'");
    if (texts.empty()) throw ConfigError("translate_batch: no texts");
    if (options.parallelism == 0) throw ConfigError("parallelism must be positive");

    const std::string backend_id = backend.id();
    std::vector<std::optional<std::string>> results(texts.size());

    // Unique misses, each remembered by its first input index.
    std::vector<std::size_t> work;
    std::unordered_map<std::string, std::size_t> first_index;
    std::vector<std::string> keys(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        keys[i] = cache_key(texts[i], src, tgt, backend_id);
        if (auto hit = cache.lookup(keys[i])) {
            results[i] = hit->translated;
        } else if (first_index.emplace(keys[i], i).second) {
            work.push_back(i);
        }
    }

    std::mutex failure_mutex;
    std::optional<std::pair<std::size_t, std::string>> failure;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t w = next.fetch_add(1); w < work.size(); w = next.fetch_add(1)) {
            const std::size_t i = work[w];
            std::string last_error;
            for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
                if (attempt > 0) {
                    std::this_thread::sleep_for(options.backoff_base * (1LL << (attempt - 1)));
                }
                try {
                    std::string out = backend.translate(texts[i], src, tgt);
                    CacheEntry e{keys[i], texts[i], std::move(out), src, tgt, backend_id, {}};
                    results[i] = cache.store(e).translated;
                    last_error.clear();
                    break;
                } catch (const IoError&) {
                    throw;
                } catch (const std::exception& ex) {
                    last_error = ex.what();
                }
            }
            if (!results[i]) {
                std::lock_guard lock(failure_mutex);
                if (!failure || i < failure->first) failure.emplace(i, last_error);
            }
        }
    };

    const std::size_t n_threads = std::min(options.parallelism, work.size());
    if (n_threads == 1) {
        worker();
    } else if (n_threads > 1) {
        std::vector<std::exception_ptr> errors(n_threads);
        {
            std::vector<std::jthread> pool;
            pool.reserve(n_threads);
            for (std::size_t t = 0; t < n_threads; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        worker();
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    if (failure) throw BatchTranslationError(failure->first, failure->second);

    std::vector<std::string> out(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!results[i]) results[i] = results[first_index.at(keys[i])];
        out[i] = *results[i];
    }
    return out;
}

}  // namespace xlproject::translate
