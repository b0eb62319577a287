// Copyright (C) 2026 The xlproject Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlproject/errors.hpp"

namespace xlproject::translate {

// A machine-translation service. Implementations must be safe to call from
// several threads at once.
class TranslationBackend {
  public:
    virtual ~TranslationBackend() = default;

    // Stable identifier; part of the cache key, so it must change whenever
    // the backend's output for a given input may change.
    virtual std::string id() const = 0;

    // Throws BackendError (or any std::exception) on failure.
    virtual std::string translate(const std::string& text, const std::string& src,
                                  const std::string& tgt) = 0;
};

class IdentityBackend final : public TranslationBackend {
  public:
    std::string id() const override { return "identity"; }
    std::string translate(const std::string& text, const std::string&, const std::string&) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return text;
    }
    std::size_t calls() const { return calls_.load(); }

  private:
    std::atomic<std::size_t> calls_{0};
};

// Word-by-word dictionary lookup keyed by target language. Whitespace tokens
// without an entry pass through unchanged, so marker symbols survive. A
// value may contain several words. Used as a deterministic test fixture.
class DictionaryBackend final : public TranslationBackend {
  public:
    using Dictionary = std::map<std::string, std::map<std::string, std::string>>;  // tgt -> word -> translation

    explicit DictionaryBackend(Dictionary dict);

    // JSON file: {"es": {"love": "quiero", ...}, "fr": {...}}.
    static Dictionary load(const std::filesystem::path& path);
    static DictionaryBackend from_file(const std::filesystem::path& path) {
        return DictionaryBackend(load(path));
    }

    std::string id() const override { return id_; }
    std::string translate(const std::string& text, const std::string& src,
                          const std::string& tgt) override;
    std::size_t calls() const { return calls_.load(); }

  private:
    Dictionary dict_;
    std::string id_;
    std::atomic<std::size_t> calls_{0};
};

// Wraps another backend and strips the given symbols from the output for
// every text the predicate selects. Exercises the projection discard path.
class MarkerDroppingBackend final : public TranslationBackend {
  public:
    using Predicate = std::function<bool(const std::string& text)>;

    MarkerDroppingBackend(std::shared_ptr<TranslationBackend> inner,
                          std::vector<std::string> symbols, Predicate affects);

    // Selects roughly one text in `every` by a stable hash of the text.
    static Predicate every_nth_by_hash(std::size_t every);

    std::string id() const override;
    std::string translate(const std::string& text, const std::string& src,
                          const std::string& tgt) override;
    bool affects(const std::string& text) const { return affects_(text); }

  private:
    std::shared_ptr<TranslationBackend> inner_;
    std::vector<std::string> symbols_;
    Predicate affects_;
};

// Generic JSON-over-HTTP service: POST {"q", "source", "target"[, "api_key"]}
// to the endpoint, expects {"translatedText": ...} back.
class RemoteHttpBackend final : public TranslationBackend {
  public:
    RemoteHttpBackend(std::string endpoint, std::string api_key,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30));

    std::string id() const override { return "remote:" + endpoint_; }
    std::string translate(const std::string& text, const std::string& src,
                          const std::string& tgt) override;

  private:
    std::string endpoint_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

struct CacheEntry {
    std::string key;
    std::string text;
    std::string translated;
    std::string src;
    std::string tgt;
    std::string backend;
    std::filesystem::file_time_type created_at{};
};

// SHA-256 (lowercase hex) over the length-prefixed fields.
std::string cache_key(std::string_view text, std::string_view src, std::string_view tgt,
                      std::string_view backend_id);

// Content-addressed on-disk cache: <root>/<first 2 hex of key>/<key>.json.
// The first write of a key wins; later writes of the same key are ignored and
// the stored entry is returned instead.
class TranslationCache {
  public:
    explicit TranslationCache(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path entry_path(std::string_view key) const;

    std::optional<CacheEntry> lookup(const std::string& key) const;
    CacheEntry store(const CacheEntry& entry);

  private:
    std::filesystem::path root_;
    mutable std::mutex mutex_;
};

struct BatchOptions {
    std::size_t parallelism = 4;
    std::size_t max_retries = 3;
    std::chrono::milliseconds backoff_base{200};
};

// Raised when an input could not be translated after all retries. Results
// for the other inputs are already cached.
class BatchTranslationError : public BackendError {
  public:
    BatchTranslationError(std::size_t index, const std::string& what)
        : BackendError("translation of input " + std::to_string(index) + " failed: " + what),
          index_(index) {}
    std::size_t index() const { return index_; }

  private:
    std::size_t index_;
};

// Output i is the translation of texts[i]. Cache hits never reach the
// backend; at most `parallelism` backend calls are in flight.
std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                         const std::string& src, const std::string& tgt,
                                         TranslationBackend& backend, TranslationCache& cache,
                                         const BatchOptions& options = {});

}  // namespace xlproject::translate
