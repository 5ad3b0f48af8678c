#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "labelrank/embed.hpp"

namespace labelrank {

// Wire contract: POST url with {"model", "mode", "texts": [...]}, response
// {"dim": int, "embeddings": [[...], ...]}. Non-2xx is transient iff >= 500.
struct ProviderConfig {
    std::string url;
    std::string model;
    std::string query_mode = "query";
    std::string document_mode = "document";
    std::size_t batch_size = 16;
    std::size_t max_retries = 3;
    std::size_t initial_backoff_ms = 100;
    double backoff_factor = 2.0;
    std::size_t max_in_flight = 1;
    std::size_t timeout_ms = 30'000;
    std::string api_key_env;  // name of the env var holding the credential
    std::optional<std::size_t> dim;  // pinned expected dimension, if any
};

// One embedding per input text, in input order; requests go out in batches of
// batch_size with bounded retry/backoff on transient failures.
std::vector<SentenceEmbedding> embed_external(const std::vector<std::string>& texts, Role role,
                                              const ProviderConfig& config);

class ExternalBackend final : public EmbeddingBackend {
public:
    explicit ExternalBackend(ProviderConfig config);

    std::string backend_id() const override { return "external:" + config_.model; }
    std::size_t dim() const override { return config_.dim.value_or(0); }
    bool supports_asymmetric() const override {
        return config_.query_mode != config_.document_mode;
    }
    SentenceEmbedding embed(const std::string& doc_id, const std::string& text, Role role,
                            std::vector<std::string>* skipped_tokens = nullptr) override;
    std::vector<SentenceEmbedding> embed_batch(const std::vector<std::string>& ids,
                                               const std::vector<std::string>& texts,
                                               Role role) override;

private:
    ProviderConfig config_;
};

}  // namespace labelrank
