#include "labelrank/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double checked_norm(std::span<const double> v, const char* what) {
    for (const double x : v)
        if (!std::isfinite(x))
            throw DataError(std::string(what) + ": non-finite component");
    const double n = std::sqrt(dot(v, v));
    if (n == 0.0)
        throw UsageError(std::string(what) + ": zero-norm vector has no cosine");
    return n;
}

double clamp_unit(double x) { return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x); }

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw UsageError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    if (a.empty())
        throw UsageError("cosine: empty vectors");
    const double na = checked_norm(a, "cosine lhs");
    const double nb = checked_norm(b, "cosine rhs");
    return clamp_unit(dot(a, b) / (na * nb));
}

SimilarityIndex SimilarityIndex::build(
    const std::vector<std::pair<std::string, SentenceEmbedding>>& labels) {
    if (labels.empty())
        throw DataError("cannot build an index over zero labels");

    SimilarityIndex index;
    index.dim_ = labels.front().second.dim();
    index.backend_id_ = labels.front().second.backend_id;
    index.ids_.reserve(labels.size());
    index.positions_.reserve(labels.size());
    index.data_.reserve(labels.size() * index.dim_);
    index.norms_.reserve(labels.size());

    for (const auto& [label_id, emb] : labels) {
        if (emb.dim() != index.dim_)
            throw DataError("label '" + label_id + "': dimension " + std::to_string(emb.dim()) +
                            " does not match index dimension " + std::to_string(index.dim_));
        if (emb.backend_id != index.backend_id_)
            throw DataError("label '" + label_id + "': backend '" + emb.backend_id +
                            "' does not match index backend '" + index.backend_id_ + "'");
        if (emb.role == Role::query)
            throw DataError("label '" + label_id + "': query-role embedding cannot be indexed");
        if (!index.positions_.emplace(label_id, index.ids_.size()).second)
            throw DataError("duplicate label_id '" + label_id + "' in index build");
        double n = 0.0;
        try {
            n = checked_norm(emb.vector, ("label '" + label_id + "'").c_str());
        } catch (const Error& e) {
            throw DataError(e.what());  // bad stored data, not a bad call
        }
        index.ids_.push_back(label_id);
        index.data_.insert(index.data_.end(), emb.vector.begin(), emb.vector.end());
        index.norms_.push_back(n);
    }
    return index;
}

std::vector<double> SimilarityIndex::scores(const SentenceEmbedding& query) const {
    if (query.dim() != dim_)
        throw UsageError("query dimension " + std::to_string(query.dim()) +
                         " does not match index dimension " + std::to_string(dim_));
    if (query.backend_id != backend_id_)
        throw UsageError("backend mismatch: query '" + query.backend_id + "' vs index '" +
                         backend_id_ + "'");
    if (query.role == Role::document)
        throw UsageError("a document-role embedding cannot be used as a query");
    const double qnorm = checked_norm(query.vector, "query");

    std::vector<double> out(size());
    const double* q = query.vector.data();
    for (std::size_t i = 0; i < size(); ++i) {
        const double* row = data_.data() + i * dim_;
        double s = 0.0;
        for (std::size_t d = 0; d < dim_; ++d)
            s += q[d] * row[d];
        out[i] = clamp_unit(s / (qnorm * norms_[i]));
    }
    return out;
}

std::size_t SimilarityIndex::position_of(const std::string& label_id) const {
    const auto it = positions_.find(label_id);
    if (it == positions_.end())
        throw DataError("label_id '" + label_id + "' not present in index");
    return it->second;
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b])
            return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

std::vector<ScoredLabel> Ranking::top_k(std::size_t k) const {
    if (k < 1 || k > size())
        throw UsageError("k must lie in [1, " + std::to_string(size()) + "], got " +
                         std::to_string(k));
    std::vector<ScoredLabel> out;
    out.reserve(k);
    for (std::size_t r = 0; r < k; ++r)
        out.push_back({index_->label_at(order_[r]), scores_[order_[r]]});
    return out;
}

Ranking rank_labels(const SentenceEmbedding& query, const SimilarityIndex& index) {
    Ranking ranking;
    ranking.index_ = &index;
    ranking.scores_ = index.scores(query);
    ranking.order_ = order_by_score(ranking.scores_);
    return ranking;
}

std::size_t gold_rank(const Ranking& ranking, const std::string& gold_label_id) {
    const std::size_t pos = ranking.index().position_of(gold_label_id);
    for (std::size_t r = 0; r < ranking.size(); ++r)
        if (ranking.position_at(r + 1) == pos)
            return r + 1;
    throw DataError("gold label '" + gold_label_id + "' missing from ranking");  // unreachable
}

RankResult make_rank_result(const Ranking& ranking, const std::string& target_id,
                            const std::string& gold_label_id, std::size_t k) {
    RankResult result;
    result.target_id = target_id;
    result.gold_rank = gold_rank(ranking, gold_label_id);
    result.top_k = ranking.top_k(k);
    result.n_labels = ranking.size();
    return result;
}

}  // namespace labelrank
