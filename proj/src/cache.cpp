#include "trendvote/cache.hpp"

#include "trendvote/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <memory>

namespace trendvote {

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string canonical_fingerprint(std::string_view model_id, double temperature, std::string_view prompt) {
    char temp[64];
    std::snprintf(temp, sizeof temp, "%.6f", temperature);
    std::string out;
    out.reserve(model_id.size() + prompt.size() + 16);
    out.append(model_id);
    out += '\n';
    out += temp;
    out += '\n';
    out.append(prompt);
    return out;
}

std::string cache_key(std::string_view model_id, double temperature, std::string_view prompt) {
    return sha256_hex(canonical_fingerprint(model_id, temperature, prompt));
}

std::string cache_key(const ClassifierRequest& request) {
    return cache_key(request.model_id, request.temperature, request.prompt);
}

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        CacheEntry e;
        try {
            const auto j = nlohmann::json::parse(line);
            e.key = j.at("key").get<std::string>();
            e.model_id = j.at("model_id").get<std::string>();
            e.temperature = j.at("temperature").get<double>();
            e.prompt = j.at("prompt").get<std::string>();
            e.raw = j.at("raw").get<std::string>();
            e.created_at = j.value("created_at", "");
        } catch (const nlohmann::json::exception& ex) {
            throw CacheIntegrityError(path_.string() + ":" + std::to_string(line_no) +
                                      ": malformed cache entry: " + ex.what());
        }
        const auto expected = cache_key(e.model_id, e.temperature, e.prompt);
        if (e.key != expected) {
            throw CacheIntegrityError(path_.string() + ":" + std::to_string(line_no) + ": digest " + e.key +
                                      " does not match its fingerprint (expected " + expected + ")");
        }
        entries_.try_emplace(e.key, std::move(e));
    }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second.raw;
    return std::nullopt;
}

void ResponseCache::append(CacheEntry entry) {
    if (entry.key.empty()) entry.key = cache_key(entry.model_id, entry.temperature, entry.prompt);
    if (entry.created_at.empty()) entry.created_at = utc_now();

    std::unique_lock lock(mutex_);
    if (entries_.contains(entry.key)) return;
    if (!out_.is_open()) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        out_.open(path_, std::ios::app | std::ios::binary);
        if (!out_) throw Error("cannot open cache file " + path_.string() + " for appending");
    }
    nlohmann::ordered_json j;
    j["key"] = entry.key;
    j["model_id"] = entry.model_id;
    j["temperature"] = entry.temperature;
    j["prompt"] = entry.prompt;
    j["raw"] = entry.raw;
    j["created_at"] = entry.created_at;
    out_ << j.dump() << '\n';
    out_.flush();
    if (!out_) throw Error("failed writing cache file " + path_.string());
    entries_.emplace(entry.key, std::move(entry));
}

std::size_t ResponseCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

CachedClassifier::CachedClassifier(std::shared_ptr<Classifier> inner, std::shared_ptr<ResponseCache> cache,
                                   std::string summary_model_id)
    : inner_(std::move(inner)), cache_(std::move(cache)), summary_model_id_(std::move(summary_model_id)) {
    if (!cache_) throw ConfigError("cached backend needs a cache");
}

ClassifierResponse CachedClassifier::classify(const ClassifierRequest& request) {
    validate(request);
    const auto key = cache_key(request);
    if (auto raw = cache_->lookup(key)) {
        ++hits_;
        ClassifierResponse response;
        response.label = parse_label(*raw, request.label_set);
        response.raw = std::move(*raw);
        response.source = ResponseSource::Cache;
        return response;
    }
    ++misses_;
    if (!inner_) throw CacheMissError(key);
    auto response = inner_->classify(request);
    cache_->append({key, request.model_id, request.temperature, request.prompt, response.raw, {}});
    return response;
}

bool CachedClassifier::can_summarize() const {
    return inner_ == nullptr || inner_->can_summarize();
}

std::string CachedClassifier::summarize_text(std::string_view article, std::size_t n_tokens) {
    std::string prompt = "summarize " + std::to_string(n_tokens) + "\n";
    prompt.append(article);
    const auto key = cache_key(summary_model_id_, 0.0, prompt);
    if (auto raw = cache_->lookup(key)) {
        ++hits_;
        return *raw;
    }
    ++misses_;
    if (!inner_) throw CacheMissError(key);
    auto text = inner_->summarize_text(article, n_tokens);
    cache_->append({key, summary_model_id_, 0.0, prompt, text, {}});
    return text;
}

}  // namespace trendvote
