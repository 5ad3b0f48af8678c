#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labelrank/embed.hpp"

namespace labelrank {

// Clamped into [-1, 1] to absorb rounding; throws on zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

// Immutable exact-scan index over the label embeddings. Entry order is fixed
// at build time (corpus order) and breaks score ties.
class SimilarityIndex {
public:
    static SimilarityIndex build(const std::vector<std::pair<std::string, SentenceEmbedding>>& labels);

    std::size_t size() const { return ids_.size(); }
    std::size_t dim() const { return dim_; }
    const std::string& backend_id() const { return backend_id_; }
    const std::string& label_at(std::size_t pos) const { return ids_[pos]; }
    bool contains(const std::string& label_id) const {
        return positions_.find(label_id) != positions_.end();
    }
    std::span<const double> vector_at(std::size_t pos) const {
        return {data_.data() + pos * dim_, dim_};
    }

    // Full similarity scores against every entry, in corpus order.
    std::vector<double> scores(const SentenceEmbedding& query) const;

    std::size_t position_of(const std::string& label_id) const;

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> positions_;
    std::vector<double> data_;  // row-major size() x dim()
    std::vector<double> norms_;
    std::size_t dim_ = 0;
    std::string backend_id_;
};

// Positions 0..n-1 ordered by score descending, ties by position ascending.
std::vector<std::size_t> order_by_score(std::span<const double> scores);

struct ScoredLabel {
    std::string label_id;
    double score;
};

struct RankResult {
    std::string target_id;
    std::size_t gold_rank = 0;  // 1-based
    std::vector<ScoredLabel> top_k;
    std::size_t n_labels = 0;
};

// Full ranking of one query against an index; the index must outlive it.
class Ranking {
public:
    const SimilarityIndex& index() const { return *index_; }
    std::size_t size() const { return order_.size(); }
    double score_of_position(std::size_t pos) const { return scores_[pos]; }
    std::size_t position_at(std::size_t rank) const { return order_[rank - 1]; }  // rank 1-based

    std::vector<ScoredLabel> top_k(std::size_t k) const;

private:
    friend Ranking rank_labels(const SentenceEmbedding&, const SimilarityIndex&);
    const SimilarityIndex* index_ = nullptr;
    std::vector<double> scores_;      // by corpus position
    std::vector<std::size_t> order_;  // positions, best first
};

Ranking rank_labels(const SentenceEmbedding& query, const SimilarityIndex& index);
Ranking rank_labels(const SentenceEmbedding&, SimilarityIndex&&) = delete;  // would dangle

// 1-based position of the gold label in the full ranking.
std::size_t gold_rank(const Ranking& ranking, const std::string& gold_label_id);

RankResult make_rank_result(const Ranking& ranking, const std::string& target_id,
                            const std::string& gold_label_id, std::size_t k);

}  // namespace labelrank
