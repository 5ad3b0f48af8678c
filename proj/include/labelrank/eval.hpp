#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "labelrank/corpus.hpp"
#include "labelrank/rank.hpp"
#include "labelrank/stats.hpp"

namespace labelrank {

struct EvalReport {
    std::string backend_id;
    std::size_t n_labels = 0;
    std::size_t n_correct = 0;
    std::size_t n_mislabeled = 0;
    double avg_rank_correct = 0.0;
    std::optional<double> avg_rank_mislabeled;       // absent when nothing is flagged
    std::vector<std::pair<std::size_t, double>> hit_at_k;  // ascending k
    std::optional<double> pearson_r;  // absent when undefined (constant series or n < 3)
    std::optional<double> p_value;
    double random_baseline = 0.0;  // (N+1)/2
};

struct MislabelVerdict {
    std::string target_id;
    std::size_t gold_rank = 0;
    bool flagged = false;
    std::size_t threshold = 0;
};

// Aggregates rank results split by the targets' mislabel annotation. hit@k is
// computed over the correct-labeled split for every k in `ks` plus N itself.
EvalReport evaluate(const std::vector<RankResult>& results,
                    const std::vector<TargetRecord>& targets, std::vector<std::size_t> ks,
                    const std::string& backend_id = {});

// Fraction of ranks <= k.
double hit_at_k(std::span<const std::size_t> ranks, std::size_t k);

// Exact expectation of a uniformly random 1-based rank over N labels.
double random_baseline(std::size_t n_labels);

// One verdict per result, flagged iff gold_rank > threshold, ordered by
// gold_rank descending (ties by target_id).
std::vector<MislabelVerdict> detect_mislabels(const std::vector<RankResult>& results,
                                              std::size_t threshold);

nlohmann::json to_json(const EvalReport& report);

}  // namespace labelrank
