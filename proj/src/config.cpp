#include "labelrank/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string resolve_path(const fs::path& base, const std::string& p) {
    if (p.empty())
        return p;
    fs::path path(p);
    if (path.is_absolute())
        return path.lexically_normal().string();
    return (base / path).lexically_normal().string();
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end() && !it->is_null()) {
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw UsageError(std::string("config field '") + key + "' has the wrong type");
        }
    }
}

}  // namespace

std::string_view backend_kind_name(BackendKind kind) {
    switch (kind) {
        case BackendKind::bag_of_vectors: return "bag_of_vectors";
        case BackendKind::external: return "external";
        case BackendKind::precomputed: return "precomputed";
    }
    return "bag_of_vectors";
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object())
        throw UsageError("config file " + path + " must hold a JSON object");

    const fs::path base = fs::path(path).parent_path();
    RunConfig cfg;
    read_into(j, "corpus", cfg.corpus_path);
    read_into(j, "targets", cfg.targets_path);
    read_into(j, "vectors", cfg.vectors_path);
    read_into(j, "stop_fraction", cfg.stop_fraction);
    read_into(j, "hit_k", cfg.hit_k);
    read_into(j, "mislabel_threshold", cfg.mislabel_threshold);
    read_into(j, "output_dir", cfg.output_dir);

    bool has_provider = false;
    if (const auto it = j.find("provider"); it != j.end() && !it->is_null()) {
        has_provider = true;
        const json& p = *it;
        read_into(p, "url", cfg.provider.url);
        read_into(p, "model", cfg.provider.model);
        read_into(p, "query_mode", cfg.provider.query_mode);
        read_into(p, "document_mode", cfg.provider.document_mode);
        read_into(p, "batch_size", cfg.provider.batch_size);
        read_into(p, "max_retries", cfg.provider.max_retries);
        read_into(p, "initial_backoff_ms", cfg.provider.initial_backoff_ms);
        read_into(p, "backoff_factor", cfg.provider.backoff_factor);
        read_into(p, "max_in_flight", cfg.provider.max_in_flight);
        read_into(p, "timeout_ms", cfg.provider.timeout_ms);
        read_into(p, "api_key_env", cfg.provider.api_key_env);
        if (const auto d = p.find("dim"); d != p.end() && !d->is_null())
            cfg.provider.dim = d->get<std::size_t>();
    }
    bool has_precomputed = false;
    if (const auto it = j.find("precomputed"); it != j.end() && !it->is_null()) {
        has_precomputed = true;
        read_into(*it, "labels", cfg.precomputed_labels_path);
        read_into(*it, "targets", cfg.precomputed_targets_path);
    }

    const int sections = (cfg.vectors_path.empty() ? 0 : 1) + (has_provider ? 1 : 0) +
                         (has_precomputed ? 1 : 0);
    if (sections > 1)
        throw UsageError("config must configure exactly one backend "
                         "(vectors / provider / precomputed)");
    if (!cfg.vectors_path.empty())
        cfg.backend = BackendKind::bag_of_vectors;
    else if (has_provider)
        cfg.backend = BackendKind::external;
    else if (has_precomputed)
        cfg.backend = BackendKind::precomputed;

    if (const auto it = j.find("backend"); it != j.end() && !it->is_null()) {
        const auto name = it->get<std::string>();
        if (name != backend_kind_name(cfg.backend))
            throw UsageError("config names backend '" + name + "' but configures '" +
                             std::string(backend_kind_name(cfg.backend)) + "'");
    }

    cfg.corpus_path = resolve_path(base, cfg.corpus_path);
    cfg.targets_path = resolve_path(base, cfg.targets_path);
    cfg.vectors_path = resolve_path(base, cfg.vectors_path);
    cfg.precomputed_labels_path = resolve_path(base, cfg.precomputed_labels_path);
    cfg.precomputed_targets_path = resolve_path(base, cfg.precomputed_targets_path);
    cfg.output_dir = resolve_path(base, cfg.output_dir);
    return cfg;
}

void RunConfig::validate(bool require_backend) const {
    if (corpus_path.empty())
        throw UsageError("no corpus path configured");
    if (!(stop_fraction > 0.0) || stop_fraction > 1.0)
        throw UsageError("stop_fraction must lie in (0, 1]");
    if (mislabel_threshold < 1)
        throw UsageError("mislabel_threshold must be >= 1");
    for (const std::size_t k : hit_k)
        if (k < 1)
            throw UsageError("hit_k entries must be >= 1");
    if (!require_backend)
        return;
    switch (backend) {
        case BackendKind::bag_of_vectors:
            if (vectors_path.empty())
                throw UsageError("bag_of_vectors backend needs a 'vectors' path");
            break;
        case BackendKind::external:
            if (provider.url.empty())
                throw UsageError("external backend needs provider.url");
            break;
        case BackendKind::precomputed:
            if (precomputed_labels_path.empty())
                throw UsageError("precomputed backend needs precomputed.labels");
            break;
    }
}

}  // namespace labelrank
