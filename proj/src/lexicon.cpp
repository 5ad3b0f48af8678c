#include "labelrank/lexicon.hpp"

#include <cmath>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

void check_fraction(double theta) {
    if (!(theta > 0.0) || theta > 1.0)
        throw UsageError("stop fraction must lie in (0, 1], got " + std::to_string(theta));
}

std::unordered_map<std::string, std::size_t> document_frequencies(
    const std::vector<TokenizedDoc>& docs) {
    std::unordered_map<std::string, std::size_t> df;
    std::unordered_set<std::string> in_doc;
    for (const auto& doc : docs) {
        in_doc.clear();
        for (const auto& t : doc.tokens)
            if (in_doc.insert(t).second)
                ++df[t];
    }
    return df;
}

}  // namespace

Lexicon build_lexicon(const std::vector<TokenizedDoc>& docs, double stop_fraction) {
    check_fraction(stop_fraction);
    if (docs.empty())
        throw UsageError("cannot build a lexicon from zero documents");

    Lexicon lex;
    lex.doc_count = docs.size();
    lex.stop_fraction = stop_fraction;
    lex.df = document_frequencies(docs);
    const double cutoff = stop_fraction * static_cast<double>(lex.doc_count);
    for (const auto& [token, freq] : lex.df)
        if (static_cast<double>(freq) > cutoff)
            lex.stopwords.insert(token);
    return lex;
}

std::vector<std::pair<double, std::size_t>> stopword_curve(
    const std::vector<TokenizedDoc>& docs, const std::vector<double>& theta_grid) {
    if (docs.empty())
        throw UsageError("cannot build a lexicon from zero documents");
    if (theta_grid.empty())
        throw UsageError("empty theta grid");
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        check_fraction(theta_grid[i]);
        if (i > 0 && theta_grid[i] < theta_grid[i - 1])
            throw UsageError("theta grid must be ascending");
    }

    const auto df = document_frequencies(docs);
    const auto n = static_cast<double>(docs.size());
    std::vector<std::pair<double, std::size_t>> curve;
    curve.reserve(theta_grid.size());
    for (const double theta : theta_grid) {
        std::size_t remaining = 0;
        for (const auto& [token, freq] : df)
            if (static_cast<double>(freq) <= theta * n)
                ++remaining;
        curve.emplace_back(theta, remaining);
    }
    return curve;
}

double idf(const std::string& token, const Lexicon& lex) {
    const auto freq = static_cast<double>(lex.df_of(token));
    return std::log((1.0 + static_cast<double>(lex.doc_count)) / (1.0 + freq)) + 1.0;
}

std::map<std::string, double> tfidf_weights(const TokenizedDoc& doc, const Lexicon& lex) {
    std::map<std::string, std::size_t> tf;
    for (const auto& t : doc.tokens)
        if (!lex.is_stopword(t))
            ++tf[t];
    std::map<std::string, double> weights;
    for (const auto& [token, count] : tf)
        weights.emplace(token, static_cast<double>(count) * idf(token, lex));
    return weights;
}

}  // namespace labelrank
