#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "labelrank/corpus.hpp"

namespace labelrank {

// Corpus statistics over the label side: document frequencies, the
// frequency-based stop-word set (df > θ·N) and IDF weights.
struct Lexicon {
    std::size_t doc_count = 0;
    double stop_fraction = 0.0;  // θ
    std::unordered_map<std::string, std::size_t> df;
    std::unordered_set<std::string> stopwords;

    bool is_stopword(const std::string& token) const {
        return stopwords.find(token) != stopwords.end();
    }
    std::size_t df_of(const std::string& token) const {
        const auto it = df.find(token);
        return it == df.end() ? 0 : it->second;
    }
};

Lexicon build_lexicon(const std::vector<TokenizedDoc>& docs, double stop_fraction);

// (θ, surviving vocabulary size) rows for the stop-word elbow plot.
// theta_grid must be ascending, each value in (0, 1].
std::vector<std::pair<double, std::size_t>> stopword_curve(
    const std::vector<TokenizedDoc>& docs, const std::vector<double>& theta_grid);

// Smoothed IDF: ln((1+N)/(1+df)) + 1. Unknown tokens take df = 0.
double idf(const std::string& token, const Lexicon& lex);

// tf·idf per token with stop words excluded; tf is the raw in-doc count.
// Ordered map so downstream accumulation visits tokens in a fixed order.
std::map<std::string, double> tfidf_weights(const TokenizedDoc& doc, const Lexicon& lex);

}  // namespace labelrank
