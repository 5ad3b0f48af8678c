#include "labelrank/provider.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

using json = nlohmann::json;

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading '/', defaults to "/"
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw UsageError("provider url must include a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string resolve_api_key(const ProviderConfig& cfg) {
    if (cfg.api_key_env.empty())
        return {};
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key)
        throw UsageError("environment variable '" + cfg.api_key_env +
                         "' named by the provider config is not set");
    return key;
}

const char* mode_for_role(const ProviderConfig& cfg, Role role) {
    const bool asym = cfg.query_mode != cfg.document_mode;
    if (!asym)
        return "symmetric";
    switch (role) {
        case Role::query: return cfg.query_mode.c_str();
        case Role::document: return cfg.document_mode.c_str();
        case Role::symmetric: return "symmetric";
    }
    return "symmetric";
}

// One wire round trip with bounded retry. Transient = no response or 5xx.
std::vector<std::vector<double>> fetch_batch(const ProviderConfig& cfg, const ParsedUrl& url,
                                             const std::string& api_key, const char* mode,
                                             const std::vector<std::string>& texts,
                                             std::size_t expected_dim_hint,
                                             std::size_t* seen_dim) {
    json body;
    body["model"] = cfg.model;
    body["mode"] = mode;
    body["texts"] = texts;
    const std::string payload = body.dump();

    int last_status = 0;
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            const double ms = static_cast<double>(cfg.initial_backoff_ms) *
                              std::pow(cfg.backoff_factor, static_cast<double>(attempt - 1));
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<std::int64_t>(ms)));
        }

        httplib::Client client(url.base);
        client.set_connection_timeout(std::chrono::milliseconds(cfg.timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(cfg.timeout_ms));
        httplib::Headers headers;
        if (!api_key.empty())
            headers.emplace("Authorization", "Bearer " + api_key);

        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_status = 0;
            last_error = "no response (" + httplib::to_string(res.error()) + ")";
            continue;  // transient
        }
        if (res->status < 200 || res->status >= 300) {
            last_status = res->status;
            last_error = "provider returned status " + std::to_string(res->status);
            if (res->status >= 500)
                continue;  // transient
            throw TransportError("provider request failed: " + last_error, res->status);
        }

        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::exception& e) {
            throw ContractError(std::string("provider response is not valid JSON: ") + e.what());
        }
        if (!reply.contains("dim") || !reply["dim"].is_number_unsigned() ||
            !reply.contains("embeddings") || !reply["embeddings"].is_array())
            throw ContractError("provider response missing 'dim' or 'embeddings'");

        const auto dim = reply["dim"].get<std::size_t>();
        if (dim == 0)
            throw ContractError("provider declared dimension 0");
        if (expected_dim_hint != 0 && dim != expected_dim_hint)
            throw ContractError("provider declared dim " + std::to_string(dim) + ", expected " +
                                std::to_string(expected_dim_hint));
        const auto& rows = reply["embeddings"];
        if (rows.size() != texts.size())
            throw ContractError("provider returned " + std::to_string(rows.size()) +
                                " embeddings for " + std::to_string(texts.size()) + " texts");

        std::vector<std::vector<double>> out;
        out.reserve(rows.size());
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != dim)
                throw ContractError("provider declared dim " + std::to_string(dim) +
                                    " but a row has " + std::to_string(row.size()) + " values");
            std::vector<double> vec;
            vec.reserve(dim);
            for (const auto& v : row) {
                if (!v.is_number())
                    throw ContractError("provider returned a non-numeric component");
                const double d = v.get<double>();
                if (!std::isfinite(d))
                    throw ContractError("provider returned a non-finite component");
                vec.push_back(d);
            }
            out.push_back(std::move(vec));
        }
        if (seen_dim)
            *seen_dim = dim;
        return out;
    }
    throw TransportError("provider request failed after " + std::to_string(cfg.max_retries + 1) +
                             " attempts: " + last_error,
                         last_status);
}

}  // namespace

std::vector<SentenceEmbedding> embed_external(const std::vector<std::string>& texts, Role role,
                                              const ProviderConfig& cfg) {
    if (cfg.batch_size == 0)
        throw UsageError("provider batch_size must be positive");
    if (texts.empty())
        return {};

    const ParsedUrl url = split_url(cfg.url);
    const std::string api_key = resolve_api_key(cfg);
    const char* mode = mode_for_role(cfg, role);
    const std::string backend_id = "external:" + cfg.model;

    const std::size_t n_batches = (texts.size() + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<std::vector<std::vector<double>>> slots(n_batches);
    std::vector<std::size_t> slot_dims(n_batches, 0);

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_batch = n_batches;

    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_batches)
                return;
            const std::size_t begin = b * cfg.batch_size;
            const std::size_t end = std::min(begin + cfg.batch_size, texts.size());
            std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                           texts.begin() + static_cast<std::ptrdiff_t>(end));
            try {
                slots[b] = fetch_batch(cfg, url, api_key, mode, chunk, cfg.dim.value_or(0),
                                       &slot_dims[b]);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (b < first_error_batch) {
                    first_error_batch = b;
                    first_error = std::current_exception();
                }
            }
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.max_in_flight, n_batches));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    // All batches must agree on the dimension.
    const std::size_t dim = slot_dims.front();
    for (const std::size_t d : slot_dims)
        if (d != dim)
            throw ContractError("provider changed dimensions between batches");

    std::vector<SentenceEmbedding> out;
    out.reserve(texts.size());
    for (auto& slot : slots)
        for (auto& vec : slot)
            out.push_back(SentenceEmbedding{std::move(vec), backend_id, role});
    return out;
}

ExternalBackend::ExternalBackend(ProviderConfig config) : config_(std::move(config)) {
    if (config_.url.empty())
        throw UsageError("external backend needs a provider url");
    split_url(config_.url);  // validate eagerly
}

SentenceEmbedding ExternalBackend::embed(const std::string& doc_id, const std::string& text,
                                         Role role, std::vector<std::string>* skipped_tokens) {
    (void)doc_id;
    if (skipped_tokens)
        skipped_tokens->clear();
    auto batch = embed_external({text}, role, config_);
    return std::move(batch.front());
}

std::vector<SentenceEmbedding> ExternalBackend::embed_batch(const std::vector<std::string>& ids,
                                                            const std::vector<std::string>& texts,
                                                            Role role) {
    (void)ids;
    return embed_external(texts, role, config_);
}

}  // namespace labelrank
