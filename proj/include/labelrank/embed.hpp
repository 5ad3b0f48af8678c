#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "labelrank/corpus.hpp"
#include "labelrank/lexicon.hpp"

namespace labelrank {

enum class Role { query, document, symmetric };

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

struct SentenceEmbedding {
    std::vector<double> vector;
    std::string backend_id;
    Role role = Role::symmetric;

    std::size_t dim() const { return vector.size(); }
};

// Pre-trained word vectors plus optional hashed-subword bucket vectors for
// out-of-vocabulary fallback.
struct WordVectorTable {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
    std::vector<std::vector<double>> bucket_vectors;  // empty = no subword fallback
    std::size_t bucket_count = 2'000'000;
    int ngram_min = 3;
    int ngram_max = 6;
    std::size_t duplicate_count = 0;  // duplicate rows seen at load (last kept)

    bool has_buckets() const { return !bucket_vectors.empty(); }
};

// Text vector format: first line "count dim", then "word v1 .. v_dim".
WordVectorTable load_word_vectors(const std::string& path);

// Character n-grams of "<word>"; the full wrapped token is kept only when it
// is the single in-range candidate (wrapped length == nmin).
std::vector<std::string> subword_ngrams(std::string_view word, int nmin, int nmax);

std::uint32_t fnv1a32(std::string_view bytes);
std::size_t ngram_hash(std::string_view ngram, std::size_t bucket_count);

inline constexpr const char* kBagBackendId = "bag_of_vectors";
inline constexpr const char* kPrecomputedBackendId = "precomputed";

struct BagEmbedding {
    SentenceEmbedding embedding;
    std::vector<std::string> skipped_tokens;  // resolvable by neither route
};

// TF-IDF weighted mean of the word vectors behind `weights`; OOV tokens fall
// back to the mean of their hashed n-gram bucket vectors when buckets exist.
// Throws DataError when nothing is embeddable (never yields a zero vector).
BagEmbedding embed_bag(const TokenizedDoc& doc, const std::map<std::string, double>& weights,
                       const WordVectorTable& table);

// Id-keyed embedding store in the same text format (doc_id in the word slot).
class PrecomputedStore {
public:
    static PrecomputedStore load(const std::string& path);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(const std::string& doc_id) const {
        return vectors_.find(doc_id) != vectors_.end();
    }
    SentenceEmbedding get(const std::string& doc_id, Role role = Role::symmetric) const;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Unifies the bag-of-vectors, external-provider and precomputed paths.
// Embedding the same input with the same role is deterministic per instance.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::string backend_id() const = 0;
    virtual std::size_t dim() const = 0;
    virtual bool supports_asymmetric() const = 0;
    virtual SentenceEmbedding embed(const std::string& doc_id, const std::string& text, Role role,
                                    std::vector<std::string>* skipped_tokens = nullptr) = 0;
    virtual std::vector<SentenceEmbedding> embed_batch(const std::vector<std::string>& ids,
                                                       const std::vector<std::string>& texts,
                                                       Role role);
};

class BagOfVectorsBackend final : public EmbeddingBackend {
public:
    BagOfVectorsBackend(std::shared_ptr<const WordVectorTable> table, Lexicon lexicon);

    std::string backend_id() const override { return kBagBackendId; }
    std::size_t dim() const override { return table_->dim; }
    bool supports_asymmetric() const override { return false; }
    SentenceEmbedding embed(const std::string& doc_id, const std::string& text, Role role,
                            std::vector<std::string>* skipped_tokens = nullptr) override;

    const Lexicon& lexicon() const { return lexicon_; }
    const WordVectorTable& table() const { return *table_; }

private:
    std::shared_ptr<const WordVectorTable> table_;
    Lexicon lexicon_;
};

class PrecomputedBackend final : public EmbeddingBackend {
public:
    PrecomputedBackend(PrecomputedStore documents, std::optional<PrecomputedStore> queries);

    std::string backend_id() const override { return kPrecomputedBackendId; }
    std::size_t dim() const override { return documents_.dim(); }
    bool supports_asymmetric() const override { return queries_.has_value(); }
    // Looks up by doc_id; the text argument is ignored. Role document reads
    // the document store, query/symmetric the query store when present.
    SentenceEmbedding embed(const std::string& doc_id, const std::string& text, Role role,
                            std::vector<std::string>* skipped_tokens = nullptr) override;

private:
    PrecomputedStore documents_;
    std::optional<PrecomputedStore> queries_;
};

// Writes embeddings in the precomputed file format; doubles are printed with
// round-trip precision so reloaded rankings are bit-identical.
void write_precomputed(const std::vector<std::pair<std::string, SentenceEmbedding>>& rows,
                       const std::string& path);

}  // namespace labelrank
