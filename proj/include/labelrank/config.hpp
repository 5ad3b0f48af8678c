#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "labelrank/provider.hpp"

namespace labelrank {

enum class BackendKind { bag_of_vectors, external, precomputed };

std::string_view backend_kind_name(BackendKind kind);

// One JSON document drives a reproducible run. Exactly one backend section
// (vectors / provider / precomputed) may be present; relative paths resolve
// against the config file's directory. Flags override config which overrides
// defaults.
struct RunConfig {
    std::string corpus_path;
    std::string targets_path;

    BackendKind backend = BackendKind::bag_of_vectors;
    std::string vectors_path;                        // bag_of_vectors
    ProviderConfig provider;                         // external
    std::string precomputed_labels_path;             // precomputed
    std::string precomputed_targets_path;            // precomputed, optional

    double stop_fraction = 0.2;
    std::vector<std::size_t> hit_k = {1, 5, 10, 15, 20, 100};
    std::size_t mislabel_threshold = 100;
    std::string output_dir = "out";

    static RunConfig from_file(const std::string& path);

    // Final checks once flag overrides are applied. Subcommands that never
    // embed anything (ingest, stopwords) skip the backend requirements.
    void validate(bool require_backend = true) const;
};

}  // namespace labelrank
