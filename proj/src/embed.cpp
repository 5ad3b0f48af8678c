#include "labelrank/embed.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

struct VectorFile {
    std::size_t dim = 0;
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    std::size_t duplicate_count = 0;  // counted by the consumer
};

double parse_component(std::string_view field, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw DataError(path + ":" + std::to_string(line_no) + ": bad vector component '" +
                        std::string(field) + "'");
    if (!std::isfinite(value))
        throw DataError(path + ":" + std::to_string(line_no) + ": non-finite vector component");
    return value;
}

VectorFile parse_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open vector file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError(path + ": empty vector file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    std::size_t declared_count = 0;
    std::size_t dim = 0;
    {
        const char* p = line.data();
        const char* end = line.data() + line.size();
        auto r1 = std::from_chars(p, end, declared_count);
        if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ' ')
            throw DataError(path + ":1: header must be 'count dim'");
        auto r2 = std::from_chars(r1.ptr + 1, end, dim);
        if (r2.ec != std::errc{} || r2.ptr != end)
            throw DataError(path + ":1: header must be 'count dim'");
    }
    if (dim == 0)
        throw DataError(path + ":1: declared dimension must be positive");

    VectorFile file;
    file.dim = dim;
    file.rows.reserve(declared_count);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::size_t sep = line.find(' ');
        if (sep == std::string::npos || sep == 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 'key v1 .. v_dim'");
        std::pair<std::string, std::vector<double>> row;
        row.first = line.substr(0, sep);
        row.second.reserve(dim);
        std::size_t pos = sep + 1;
        while (pos < line.size()) {
            std::size_t next = line.find(' ', pos);
            if (next == std::string::npos)
                next = line.size();
            if (next > pos)
                row.second.push_back(
                    parse_component(std::string_view(line).substr(pos, next - pos), path, line_no));
            pos = next + 1;
        }
        if (row.second.size() != dim)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " components, got " +
                            std::to_string(row.second.size()));
        file.rows.push_back(std::move(row));
    }
    if (file.rows.size() != declared_count)
        throw DataError(path + ": header declares " + std::to_string(declared_count) +
                        " rows, file has " + std::to_string(file.rows.size()));
    return file;
}

}  // namespace

std::string_view role_name(Role role) {
    switch (role) {
        case Role::query: return "query";
        case Role::document: return "document";
        case Role::symmetric: return "symmetric";
    }
    return "symmetric";
}

Role role_from_name(std::string_view name) {
    if (name == "query") return Role::query;
    if (name == "document") return Role::document;
    if (name == "symmetric") return Role::symmetric;
    throw UsageError("unknown role '" + std::string(name) + "'");
}

WordVectorTable load_word_vectors(const std::string& path) {
    auto file = parse_vector_file(path);
    WordVectorTable table;
    table.dim = file.dim;
    table.vectors.reserve(file.rows.size());
    for (auto& [word, vec] : file.rows) {
        auto [it, inserted] = table.vectors.insert_or_assign(std::move(word), std::move(vec));
        (void)it;
        if (!inserted)
            ++table.duplicate_count;  // last occurrence wins
    }
    return table;
}

std::vector<std::string> subword_ngrams(std::string_view word, int nmin, int nmax) {
    if (nmin < 1 || nmax < nmin)
        throw UsageError("invalid n-gram bounds: nmin=" + std::to_string(nmin) +
                         " nmax=" + std::to_string(nmax));

    std::string wrapped;
    wrapped.reserve(word.size() + 2);
    wrapped.push_back('<');
    wrapped.append(word);
    wrapped.push_back('>');

    // Code-point starts, so multi-byte characters count as one unit.
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < wrapped.size(); ++i)
        if ((static_cast<unsigned char>(wrapped[i]) & 0xC0) != 0x80)
            starts.push_back(i);
    starts.push_back(wrapped.size());
    const std::size_t len = starts.size() - 1;

    std::vector<std::string> grams;
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t n = static_cast<std::size_t>(nmin);
             n <= static_cast<std::size_t>(nmax) && i + n <= len; ++n) {
            if (n == len)
                continue;  // the wrapped token itself
            grams.emplace_back(wrapped.substr(starts[i], starts[i + n] - starts[i]));
        }
    }
    if (grams.empty() && len >= static_cast<std::size_t>(nmin) &&
        len <= static_cast<std::size_t>(nmax))
        grams.push_back(std::move(wrapped));  // sole candidate: keep it
    return grams;
}

std::uint32_t fnv1a32(std::string_view bytes) {
    std::uint32_t h = 2166136261u;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 16777619u;
    }
    return h;
}

std::size_t ngram_hash(std::string_view ngram, std::size_t bucket_count) {
    if (bucket_count == 0)
        throw UsageError("bucket_count must be positive");
    return fnv1a32(ngram) % bucket_count;
}

BagEmbedding embed_bag(const TokenizedDoc& doc, const std::map<std::string, double>& weights,
                       const WordVectorTable& table) {
    BagEmbedding out;
    std::vector<double> sum(table.dim, 0.0);
    std::vector<double> subword(table.dim, 0.0);
    double weight_sum = 0.0;

    for (const auto& [token, weight] : weights) {
        const auto it = table.vectors.find(token);
        const double* vec = nullptr;
        if (it != table.vectors.end()) {
            vec = it->second.data();
        } else if (table.has_buckets()) {
            const auto grams = subword_ngrams(token, table.ngram_min, table.ngram_max);
            if (grams.empty()) {
                out.skipped_tokens.push_back(token);
                continue;
            }
            std::fill(subword.begin(), subword.end(), 0.0);
            for (const auto& g : grams) {
                const auto& bucket = table.bucket_vectors[ngram_hash(g, table.bucket_count)];
                for (std::size_t d = 0; d < table.dim; ++d)
                    subword[d] += bucket[d];
            }
            const auto inv = 1.0 / static_cast<double>(grams.size());
            for (std::size_t d = 0; d < table.dim; ++d)
                subword[d] *= inv;
            vec = subword.data();
        } else {
            out.skipped_tokens.push_back(token);
            continue;
        }
        for (std::size_t d = 0; d < table.dim; ++d)
            sum[d] += weight * vec[d];
        weight_sum += weight;
    }

    if (weight_sum <= 0.0) {
        std::string msg = "unembeddable document '" + doc.doc_id + "'";
        if (!out.skipped_tokens.empty()) {
            msg += ": no vector for";
            for (const auto& t : out.skipped_tokens)
                msg += " '" + t + "'";
        } else {
            msg += ": no weighted tokens (all stop words or empty)";
        }
        throw DataError(msg);
    }

    out.embedding.vector.resize(table.dim);
    for (std::size_t d = 0; d < table.dim; ++d)
        out.embedding.vector[d] = sum[d] / weight_sum;
    out.embedding.backend_id = kBagBackendId;
    out.embedding.role = Role::symmetric;
    return out;
}

PrecomputedStore PrecomputedStore::load(const std::string& path) {
    auto file = parse_vector_file(path);
    PrecomputedStore store;
    store.dim_ = file.dim;
    store.vectors_.reserve(file.rows.size());
    for (auto& [id, vec] : file.rows)
        store.vectors_.insert_or_assign(std::move(id), std::move(vec));
    return store;
}

SentenceEmbedding PrecomputedStore::get(const std::string& doc_id, Role role) const {
    const auto it = vectors_.find(doc_id);
    if (it == vectors_.end())
        throw DataError("no precomputed embedding for id '" + doc_id + "'");
    return SentenceEmbedding{it->second, kPrecomputedBackendId, role};
}

std::vector<SentenceEmbedding> EmbeddingBackend::embed_batch(const std::vector<std::string>& ids,
                                                             const std::vector<std::string>& texts,
                                                             Role role) {
    if (ids.size() != texts.size())
        throw UsageError("embed_batch: ids and texts differ in length");
    std::vector<SentenceEmbedding> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i)
        out.push_back(embed(ids[i], texts[i], role));
    return out;
}

BagOfVectorsBackend::BagOfVectorsBackend(std::shared_ptr<const WordVectorTable> table,
                                         Lexicon lexicon)
    : table_(std::move(table)), lexicon_(std::move(lexicon)) {
    if (!table_ || table_->dim == 0)
        throw UsageError("bag-of-vectors backend needs a loaded word-vector table");
}

SentenceEmbedding BagOfVectorsBackend::embed(const std::string& doc_id, const std::string& text,
                                             Role role, std::vector<std::string>* skipped_tokens) {
    (void)role;  // symmetric backend: role is ignored
    const auto doc = tokenize(text, doc_id);
    auto bag = embed_bag(doc, tfidf_weights(doc, lexicon_), *table_);
    if (skipped_tokens)
        *skipped_tokens = std::move(bag.skipped_tokens);
    return std::move(bag.embedding);
}

PrecomputedBackend::PrecomputedBackend(PrecomputedStore documents,
                                       std::optional<PrecomputedStore> queries)
    : documents_(std::move(documents)), queries_(std::move(queries)) {
    if (queries_ && queries_->dim() != documents_.dim())
        throw DataError("precomputed stores disagree on dimension: " +
                        std::to_string(documents_.dim()) + " vs " +
                        std::to_string(queries_->dim()));
}

SentenceEmbedding PrecomputedBackend::embed(const std::string& doc_id, const std::string& text,
                                            Role role, std::vector<std::string>* skipped_tokens) {
    (void)text;
    if (skipped_tokens)
        skipped_tokens->clear();
    if (role == Role::document || !queries_)
        return documents_.get(doc_id, role);
    return queries_->get(doc_id, role);
}

void write_precomputed(const std::vector<std::pair<std::string, SentenceEmbedding>>& rows,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write vector file: " + path);
    const std::size_t dim = rows.empty() ? 0 : rows.front().second.dim();
    out << rows.size() << ' ' << dim << '\n';
    char buf[40];
    for (const auto& [id, emb] : rows) {
        if (emb.dim() != dim)
            throw DataError("mixed dimensions while writing '" + path + "'");
        out << id;
        for (const double v : emb.vector) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace labelrank
