#include "labelrank/eval.hpp"

#include <algorithm>
#include <unordered_map>

#include "labelrank/errors.hpp"

namespace labelrank {

EvalReport evaluate(const std::vector<RankResult>& results,
                    const std::vector<TargetRecord>& targets, std::vector<std::size_t> ks,
                    const std::string& backend_id) {
    if (targets.empty())
        throw DataError("evaluate: no targets");

    std::unordered_map<std::string, const RankResult*> by_id;
    by_id.reserve(results.size());
    for (const auto& r : results)
        by_id.emplace(r.target_id, &r);

    EvalReport report;
    report.backend_id = backend_id;

    std::vector<std::size_t> correct_ranks;
    std::vector<double> correct_counts;  // word counts, paired with correct_ranks
    double mislabeled_sum = 0.0;
    for (const auto& t : targets) {
        const auto it = by_id.find(t.target_id);
        if (it == by_id.end())
            throw DataError("evaluate: no rank result for target '" + t.target_id + "'");
        const RankResult& r = *it->second;
        if (report.n_labels == 0)
            report.n_labels = r.n_labels;
        else if (report.n_labels != r.n_labels)
            throw DataError("evaluate: rank results disagree on label count");
        if (t.mislabel_flag.value_or(false)) {
            ++report.n_mislabeled;
            mislabeled_sum += static_cast<double>(r.gold_rank);
        } else {
            correct_ranks.push_back(r.gold_rank);
            correct_counts.push_back(static_cast<double>(t.word_count));
        }
    }

    report.n_correct = correct_ranks.size();
    if (report.n_correct == 0)
        throw DataError("evaluate: zero correct-labeled targets; correlation undefined");

    double correct_sum = 0.0;
    for (const std::size_t r : correct_ranks)
        correct_sum += static_cast<double>(r);
    report.avg_rank_correct = correct_sum / static_cast<double>(report.n_correct);
    if (report.n_mislabeled > 0)
        report.avg_rank_mislabeled = mislabeled_sum / static_cast<double>(report.n_mislabeled);

    ks.push_back(100);  // the headline metric is always reported
    ks.push_back(report.n_labels);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (const std::size_t k : ks)
        report.hit_at_k.emplace_back(k, hit_at_k(correct_ranks, k));

    // Length-vs-rank correlation over the correct-labeled split; undefined
    // (constant series, too few points) is reported as absent, not an error.
    if (report.n_correct >= 3) {
        std::vector<double> ranks_d(correct_ranks.size());
        for (std::size_t i = 0; i < correct_ranks.size(); ++i)
            ranks_d[i] = static_cast<double>(correct_ranks[i]);
        try {
            const double r = pearson_r(correct_counts, ranks_d);
            report.pearson_r = r;
            report.p_value = t_test_two_sided(r, report.n_correct);
        } catch (const DataError&) {
        }
    }

    report.random_baseline = random_baseline(report.n_labels);
    return report;
}

double hit_at_k(std::span<const std::size_t> ranks, std::size_t k) {
    if (k < 1)
        throw UsageError("hit_at_k needs k >= 1");
    if (ranks.empty())
        throw DataError("hit_at_k over an empty rank list");
    std::size_t hits = 0;
    for (const std::size_t r : ranks)
        if (r <= k)
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double random_baseline(std::size_t n_labels) {
    if (n_labels < 1)
        throw UsageError("random_baseline needs at least one label");
    return (static_cast<double>(n_labels) + 1.0) / 2.0;
}

std::vector<MislabelVerdict> detect_mislabels(const std::vector<RankResult>& results,
                                              std::size_t threshold) {
    if (threshold < 1)
        throw UsageError("mislabel threshold must be >= 1");
    std::vector<MislabelVerdict> verdicts;
    verdicts.reserve(results.size());
    for (const auto& r : results)
        verdicts.push_back({r.target_id, r.gold_rank, r.gold_rank > threshold, threshold});
    std::sort(verdicts.begin(), verdicts.end(), [](const auto& a, const auto& b) {
        if (a.gold_rank != b.gold_rank)
            return a.gold_rank > b.gold_rank;
        return a.target_id < b.target_id;
    });
    return verdicts;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json j;
    j["backend_id"] = report.backend_id;
    j["n_labels"] = report.n_labels;
    j["n_correct"] = report.n_correct;
    j["n_mislabeled"] = report.n_mislabeled;
    j["avg_rank_correct"] = report.avg_rank_correct;
    if (report.avg_rank_mislabeled)
        j["avg_rank_mislabeled"] = *report.avg_rank_mislabeled;
    else
        j["avg_rank_mislabeled"] = nullptr;
    auto& hits = j["hit_at_k"] = nlohmann::json::array();
    for (const auto& [k, fraction] : report.hit_at_k)
        hits.push_back({k, fraction});
    j["pearson_r"] = report.pearson_r ? nlohmann::json(*report.pearson_r) : nlohmann::json();
    j["p_value"] = report.p_value ? nlohmann::json(*report.p_value) : nlohmann::json();
    j["random_baseline"] = report.random_baseline;
    return j;
}

}  // namespace labelrank
