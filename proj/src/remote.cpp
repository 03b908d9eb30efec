#include <httplib.h>

#include "trendvote/remote.hpp"

#include "trendvote/error.hpp"
#include "trendvote/log.hpp"
#include "trendvote/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

namespace trendvote {

namespace {

bool retryable(int status) {
    return status == 429 || status >= 500;
}

double jitter() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    return 0.5 + 0.5 * uniform01(rng);
}

}  // namespace

RemoteClassifier::RemoteClassifier(RemoteConfig config, SleepFn sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (config_.max_attempts < 1) throw ConfigError("remote max_attempts must be at least 1");
    if (config_.max_in_flight < 1) throw ConfigError("remote max_in_flight must be at least 1");

    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("credential environment variable " + config_.api_key_env + " is not set");
    }
    credential_ = key;

    const auto scheme = config_.endpoint.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + config_.endpoint);
    const auto slash = config_.endpoint.find('/', scheme + 3);
    base_url_ = config_.endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

void RemoteClassifier::acquire_slot() {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
}

void RemoteClassifier::release_slot() {
    {
        std::lock_guard lock(slots_mutex_);
        --in_flight_;
    }
    slots_cv_.notify_one();
}

void RemoteClassifier::pace() {
    if (config_.requests_per_minute <= 0.0) return;
    const auto spacing = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(60.0 / config_.requests_per_minute));
    std::chrono::steady_clock::duration wait{};
    {
        std::lock_guard lock(pace_mutex_);
        const auto now = std::chrono::steady_clock::now();
        const auto start = std::max(now, next_start_);
        next_start_ = start + spacing;
        wait = start - now;
    }
    if (wait > std::chrono::steady_clock::duration::zero()) {
        sleep_(std::chrono::ceil<std::chrono::milliseconds>(wait));
    }
}

std::string RemoteClassifier::complete(const std::string& model_id, double temperature,
                                       const std::string& prompt) {
    nlohmann::ordered_json body;
    body["model"] = model_id;
    body["temperature"] = temperature;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
    const auto payload = body.dump();
    const httplib::Headers headers{{"Authorization", "Bearer " + credential_}};

    acquire_slot();
    struct SlotGuard {
        RemoteClassifier* self;
        ~SlotGuard() { self->release_slot(); }
    } guard{this};

    std::string last_failure;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        pace();
        ++calls_;
        httplib::Client client(base_url_);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        auto res = client.Post(path_, headers, payload, "application/json");

        std::chrono::milliseconds retry_after{0};
        if (!res) {
            last_failure = "transport failure: " + httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
            try {
                const auto reply = nlohmann::json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw BackendError(std::string("unexpected chat-completion response: ") + e.what());
            }
        } else if (!retryable(res->status)) {
            throw FatalBackendError("endpoint rejected request with HTTP " + std::to_string(res->status) + ": " +
                                        res->body.substr(0, 200),
                                    res->status);
        } else {
            last_failure = "HTTP " + std::to_string(res->status);
            if (res->has_header("Retry-After")) {
                const auto value = res->get_header_value("Retry-After");
                char* end = nullptr;
                const double secs = std::strtod(value.c_str(), &end);
                if (end != value.c_str() && secs > 0) {
                    retry_after = std::chrono::milliseconds(static_cast<long long>(secs * 1000));
                }
            }
        }

        if (attempt == config_.max_attempts) break;
        ++retries_;
        const std::chrono::milliseconds exp = config_.base_backoff * (1LL << std::min(attempt - 1, 20));
        auto delay = std::chrono::milliseconds(static_cast<long long>(
            static_cast<double>(std::min(exp, config_.max_backoff).count()) * jitter()));
        delay = std::max(delay, retry_after);
        log::warn("remote attempt " + std::to_string(attempt) + " failed (" + last_failure + "), retrying in " +
                  std::to_string(delay.count()) + " ms");
        sleep_(delay);
    }
    throw TransportError("remote endpoint failed after " + std::to_string(config_.max_attempts) +
                         " attempts: " + last_failure);
}

ClassifierResponse RemoteClassifier::classify(const ClassifierRequest& request) {
    validate(request);
    ClassifierResponse response;
    response.raw = complete(request.model_id, request.temperature, request.prompt);
    response.label = parse_label(response.raw, request.label_set);
    response.source = ResponseSource::Remote;
    return response;
}

std::string RemoteClassifier::summarize_text(std::string_view article, std::size_t n_tokens) {
    std::string prompt = "Summarize the following news article in at most " + std::to_string(n_tokens) +
                         " words.\n\nArticle: ";
    prompt.append(article);
    prompt += "\n\nSummary:";
    return complete(config_.summary_model_id, 0.0, prompt);
}

}  // namespace trendvote
