#pragma once

#include "trendvote/backend.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>

namespace trendvote {

struct RemoteConfig {
    // Full chat-completion URL, e.g. https://api.openai.com/v1/chat/completions.
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "TRENDVOTE_API_KEY";
    std::string summary_model_id = "gpt-3.5-turbo-0301";
    int max_attempts = 5;
    std::chrono::milliseconds base_backoff{500};
    std::chrono::milliseconds max_backoff{30000};
    std::size_t max_in_flight = 4;
    double requests_per_minute = 0.0;  // 0 disables the limiter
    std::chrono::seconds timeout{60};
};

// Chat-completion client. Transient failures (connection errors, 429, 5xx)
// are retried with jittered exponential backoff; other 4xx are fatal.
class RemoteClassifier final : public Classifier {
public:
    using SleepFn = std::function<void(std::chrono::milliseconds)>;

    // Reads the credential from the configured environment variable and
    // throws ConfigError when it is missing, before any network traffic.
    explicit RemoteClassifier(RemoteConfig config, SleepFn sleep = {});

    ClassifierResponse classify(const ClassifierRequest& request) override;

    bool can_summarize() const override { return true; }
    std::string summarize_text(std::string_view article, std::size_t n_tokens) override;

    // Returns the assistant message content.
    std::string complete(const std::string& model_id, double temperature, const std::string& prompt);

    std::size_t calls() const { return calls_.load(); }
    std::size_t retries() const { return retries_.load(); }

private:
    void acquire_slot();
    void release_slot();
    void pace();

    RemoteConfig config_;
    std::string credential_;
    std::string base_url_;
    std::string path_;
    SleepFn sleep_;

    std::mutex slots_mutex_;
    std::condition_variable slots_cv_;
    std::size_t in_flight_ = 0;

    std::mutex pace_mutex_;
    std::chrono::steady_clock::time_point next_start_{};

    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> retries_{0};
};

}  // namespace trendvote
