#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "labelrank/corpus.hpp"
#include "labelrank/embed.hpp"
#include "labelrank/errors.hpp"
#include "labelrank/eval.hpp"
#include "labelrank/lexicon.hpp"
#include "labelrank/rank.hpp"
#include "labelrank/stats.hpp"

namespace py = pybind11;
using namespace labelrank;

namespace {

TokenizedDoc make_doc(const std::vector<std::string>& tokens, const std::string& doc_id) {
    return TokenizedDoc{doc_id, tokens};
}

WordVectorTable make_table(const std::map<std::string, std::vector<double>>& vectors) {
    WordVectorTable table;
    for (const auto& [word, vec] : vectors) {
        if (table.dim == 0)
            table.dim = vec.size();
        else if (vec.size() != table.dim)
            throw DataError("word '" + word + "': mixed dimensions");
        table.vectors.emplace(word, vec);
    }
    if (table.dim == 0)
        throw UsageError("empty word-vector table");
    return table;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "labelrank core: description cleaning, TF-IDF lexicon, bag-of-vectors "
              "embedding, cosine ranking and evaluation statistics";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    m.def("strip_regulation_refs",
          [](const std::string& text) { return strip_regulation_refs(text); },
          py::arg("text"));
    m.def("tokenize",
          [](const std::string& text) { return tokenize(text).tokens; }, py::arg("text"));

    py::class_<Lexicon>(m, "Lexicon")
        .def_readonly("doc_count", &Lexicon::doc_count)
        .def_readonly("stop_fraction", &Lexicon::stop_fraction)
        .def_property_readonly("stopwords",
                               [](const Lexicon& lex) {
                                   return std::vector<std::string>(lex.stopwords.begin(),
                                                                   lex.stopwords.end());
                               })
        .def("df", &Lexicon::df_of, py::arg("token"))
        .def("is_stopword", &Lexicon::is_stopword, py::arg("token"));

    m.def("build_lexicon",
          [](const std::vector<std::vector<std::string>>& docs, double stop_fraction) {
              std::vector<TokenizedDoc> wrapped;
              wrapped.reserve(docs.size());
              for (const auto& tokens : docs)
                  wrapped.push_back(make_doc(tokens, {}));
              return build_lexicon(wrapped, stop_fraction);
          },
          py::arg("docs"), py::arg("stop_fraction") = 0.2);
    m.def("stopword_curve",
          [](const std::vector<std::vector<std::string>>& docs, const std::vector<double>& grid) {
              std::vector<TokenizedDoc> wrapped;
              wrapped.reserve(docs.size());
              for (const auto& tokens : docs)
                  wrapped.push_back(make_doc(tokens, {}));
              return stopword_curve(wrapped, grid);
          },
          py::arg("docs"), py::arg("theta_grid"));
    m.def("idf", &idf, py::arg("token"), py::arg("lexicon"));
    m.def("tfidf_weights",
          [](const std::vector<std::string>& tokens, const Lexicon& lex) {
              return tfidf_weights(make_doc(tokens, {}), lex);
          },
          py::arg("tokens"), py::arg("lexicon"));

    m.def("subword_ngrams", &subword_ngrams, py::arg("word"), py::arg("nmin") = 3,
          py::arg("nmax") = 6);
    m.def("ngram_hash",
          [](const std::string& g, std::size_t buckets) { return ngram_hash(g, buckets); },
          py::arg("ngram"), py::arg("bucket_count") = 2'000'000);

    py::class_<WordVectorTable>(m, "WordVectorTable")
        .def(py::init(&make_table), py::arg("vectors"))
        .def_readonly("dim", &WordVectorTable::dim)
        .def_readonly("duplicate_count", &WordVectorTable::duplicate_count)
        .def("__len__", [](const WordVectorTable& t) { return t.vectors.size(); });
    m.def("load_word_vectors", &load_word_vectors, py::arg("path"));

    m.def("embed_bag",
          [](const std::vector<std::string>& tokens, const std::map<std::string, double>& weights,
             const WordVectorTable& table, const std::string& doc_id) {
              auto bag = embed_bag(make_doc(tokens, doc_id), weights, table);
              return py::make_tuple(bag.embedding.vector, bag.skipped_tokens);
          },
          py::arg("tokens"), py::arg("weights"), py::arg("table"), py::arg("doc_id") = "doc");

    m.def("cosine",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              return cosine(std::span<const double>(a), std::span<const double>(b));
          },
          py::arg("a"), py::arg("b"));

    py::class_<ScoredLabel>(m, "ScoredLabel")
        .def_readonly("label_id", &ScoredLabel::label_id)
        .def_readonly("score", &ScoredLabel::score)
        .def("__repr__", [](const ScoredLabel& s) {
            return "ScoredLabel(" + s.label_id + ", " + std::to_string(s.score) + ")";
        });

    py::class_<SimilarityIndex>(m, "SimilarityIndex")
        .def(py::init([](const std::vector<std::pair<std::string, std::vector<double>>>& labels) {
                 std::vector<std::pair<std::string, SentenceEmbedding>> rows;
                 rows.reserve(labels.size());
                 for (const auto& [id, vec] : labels)
                     rows.emplace_back(id,
                                       SentenceEmbedding{vec, kBagBackendId, Role::document});
                 return SimilarityIndex::build(rows);
             }),
             py::arg("labels"))
        .def("__len__", &SimilarityIndex::size)
        .def_property_readonly("dim", &SimilarityIndex::dim)
        .def("rank",
             [](const SimilarityIndex& index, const std::vector<double>& query, std::size_t k) {
                 const SentenceEmbedding q{query, kBagBackendId, Role::query};
                 return rank_labels(q, index).top_k(k);
             },
             py::arg("query"), py::arg("k") = 15)
        .def("gold_rank",
             [](const SimilarityIndex& index, const std::vector<double>& query,
                const std::string& gold_label_id) {
                 const SentenceEmbedding q{query, kBagBackendId, Role::query};
                 return gold_rank(rank_labels(q, index), gold_label_id);
             },
             py::arg("query"), py::arg("gold_label_id"));

    m.def("hit_at_k",
          [](const std::vector<std::size_t>& ranks, std::size_t k) {
              return hit_at_k(std::span<const std::size_t>(ranks), k);
          },
          py::arg("ranks"), py::arg("k"));
    m.def("random_baseline", &random_baseline, py::arg("n_labels"));
    m.def("pearson_r",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return pearson_r(std::span<const double>(x), std::span<const double>(y));
          },
          py::arg("x"), py::arg("y"));
    m.def("t_test_two_sided", &t_test_two_sided, py::arg("r"), py::arg("n"));
    m.def("student_t_cdf", &student_t_cdf, py::arg("t"), py::arg("df"));
}
