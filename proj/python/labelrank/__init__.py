"""Label ranking over regulatory category descriptions."""

from labelrank._core import (
    DataError,
    Lexicon,
    ScoredLabel,
    SimilarityIndex,
    UsageError,
    WordVectorTable,
    build_lexicon,
    cosine,
    embed_bag,
    hit_at_k,
    idf,
    load_word_vectors,
    ngram_hash,
    pearson_r,
    random_baseline,
    stopword_curve,
    strip_regulation_refs,
    student_t_cdf,
    subword_ngrams,
    t_test_two_sided,
    tfidf_weights,
    tokenize,
)

__all__ = [
    "DataError",
    "Lexicon",
    "ScoredLabel",
    "SimilarityIndex",
    "UsageError",
    "WordVectorTable",
    "build_lexicon",
    "cosine",
    "embed_bag",
    "hit_at_k",
    "idf",
    "load_word_vectors",
    "ngram_hash",
    "pearson_r",
    "random_baseline",
    "stopword_curve",
    "strip_regulation_refs",
    "student_t_cdf",
    "subword_ngrams",
    "t_test_two_sided",
    "tfidf_weights",
    "tokenize",
]
