#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelrank {

// One regulatory category (a row of the label corpus).
struct LabelEntry {
    std::string label_id;         // e.g. a regulation number like "868.5320"
    std::string name;             // short device-type title
    std::string description;      // cleaned text
    std::string raw_description;  // text as loaded
};

// One device to classify against the label corpus.
struct TargetRecord {
    std::string target_id;
    std::string description;  // cleaned text
    std::string gold_label_id;
    std::optional<bool> mislabel_flag;
    std::size_t word_count = 0;  // token count before stop-word removal
};

struct TokenizedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;  // lowercase, no punctuation-only tokens
};

// Deletes every balanced "(...)" group whose contents reference a regulation:
// a '§' sign, or a code of 3-4 digits, a dot, and 2-4 digits. Everything else
// is preserved byte for byte; unmatched parentheses are left alone.
std::string strip_regulation_refs(std::string_view text);

// Lowercases and splits on Unicode whitespace and punctuation boundaries
// (hyphenated words split at the hyphen). Empty input gives an empty doc.
TokenizedDoc tokenize(std::string_view text, std::string doc_id = {});

// Ingest-time reporting for the CLI summary.
struct CorpusStats {
    std::size_t records = 0;
    std::size_t blank_lines = 0;
    std::size_t stripped_descriptions = 0;  // entries changed by cleaning
};

// Corpus file: UTF-8 JSON Lines, one record per line with fields
// label_id, name, description (optional class is accepted and ignored).
std::vector<LabelEntry> parse_label_corpus(const std::string& path,
                                           CorpusStats* stats = nullptr);

// Target file: same shape with target_id, description, gold_label_id and an
// optional mislabel_flag. Every gold_label_id must resolve against `corpus`.
std::vector<TargetRecord> parse_target_set(const std::string& path,
                                           const std::vector<LabelEntry>& corpus);

// Writes entries back in the record format (raw descriptions, so a reload
// reproduces the same cleaned entries).
void write_label_corpus(const std::vector<LabelEntry>& entries, const std::string& path);

}  // namespace labelrank
