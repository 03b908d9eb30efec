#pragma once

#include "trendvote/backend.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace trendvote {

std::string sha256_hex(std::string_view data);

// "model_id\ntemperature(%.6f)\nprompt"
std::string canonical_fingerprint(std::string_view model_id, double temperature, std::string_view prompt);

std::string cache_key(std::string_view model_id, double temperature, std::string_view prompt);
std::string cache_key(const ClassifierRequest& request);

struct CacheEntry {
    std::string key;
    std::string model_id;
    double temperature = 0.0;
    std::string prompt;
    std::string raw;
    std::string created_at;
};

// Append-only JSON Lines store of raw model responses keyed by request
// digest. Loading verifies every stored key against its fingerprint.
// Lookups may run concurrently; appends are serialized.
class ResponseCache {
public:
    // Loads path if it exists; the file is created on first append.
    explicit ResponseCache(std::filesystem::path path);

    std::optional<std::string> lookup(const std::string& key) const;

    // Persists the entry unless the key is already present. Fills key and
    // created_at when empty.
    void append(CacheEntry entry);

    std::size_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, CacheEntry> entries_;
    std::ofstream out_;
};

// Read-through cache in front of an inner backend. With no inner backend it
// runs in replay mode and every miss is a CacheMissError.
class CachedClassifier final : public Classifier {
public:
    CachedClassifier(std::shared_ptr<Classifier> inner, std::shared_ptr<ResponseCache> cache,
                     std::string summary_model_id = "summary");

    ClassifierResponse classify(const ClassifierRequest& request) override;

    bool can_summarize() const override;
    std::string summarize_text(std::string_view article, std::size_t n_tokens) override;

    bool replay() const { return inner_ == nullptr; }
    std::size_t hits() const { return hits_.load(); }
    std::size_t misses() const { return misses_.load(); }

private:
    std::shared_ptr<Classifier> inner_;
    std::shared_ptr<ResponseCache> cache_;
    std::string summary_model_id_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

}  // namespace trendvote
