#include "labelrank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "labelrank/errors.hpp"

namespace labelrank {

namespace {

using json = nlohmann::json;

// Minimal UTF-8 decoding; malformed bytes pass through as single code units
// so cleaning stays byte-preserving on dirty input.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto c0 = static_cast<unsigned char>(s[i]);
    if (c0 < 0x80) {
        ++i;
        return c0;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((c0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = c0 & 0x1F;
    } else if ((c0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = c0 & 0x0F;
    } else if ((c0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = c0 & 0x07;
    } else {
        ++i;
        return c0;
    }
    if (i + extra >= s.size()) {
        ++i;
        return c0;
    }
    for (int k = 1; k <= extra; ++k) {
        const auto cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return c0;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += static_cast<std::size_t>(extra) + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punct_cp(char32_t cp) {
    if (cp < 0x80)
        return std::ispunct(static_cast<int>(cp)) != 0;
    switch (cp) {
        case 0xA7:   // §
        case 0xAB: case 0xBB:  // guillemets
        case 0xB7:   // middle dot
        case 0x2026: // ellipsis
            return true;
        default:
            // general-punctuation dashes and quotes
            return (cp >= 0x2010 && cp <= 0x2015) || (cp >= 0x2018 && cp <= 0x201F);
    }
}

char32_t lower_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z')
        return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)  // Latin-1 uppercase block
        return cp + 32;
    return cp;
}

// True when the parenthetical contents carry a regulation reference:
// a section sign, or a token shaped DDD(D).DD(DD).
bool references_regulation(std::string_view s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (static_cast<unsigned char>(s[i]) == 0xC2 &&
            static_cast<unsigned char>(s[i + 1]) == 0xA7)
            return true;
    }
    const auto digit = [](char c) { return c >= '0' && c <= '9'; };
    std::size_t i = 0;
    while (i < s.size()) {
        if (!digit(s[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && digit(s[j])) ++j;
        const std::size_t first = j - i;
        if (first >= 3 && first <= 4 && j < s.size() && s[j] == '.') {
            std::size_t k = j + 1;
            while (k < s.size() && digit(s[k])) ++k;
            const std::size_t second = k - j - 1;
            if (second >= 2 && second <= 4)
                return true;
        }
        i = j;
    }
    return false;
}

std::string require_string(const json& rec, const char* field, std::size_t line_no,
                           const std::string& path) {
    const auto it = rec.find(field);
    if (it == rec.end() || !it->is_string())
        throw DataError(path + ":" + std::to_string(line_no) + ": missing or non-string field '" +
                        field + "'");
    return it->get<std::string>();
}

}  // namespace

std::string strip_regulation_refs(std::string_view text) {
    // Matched "(...)" pairs, found with a stack; pairs nest or are disjoint.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '(') {
                open.push_back(i);
            } else if (text[i] == ')' && !open.empty()) {
                pairs.emplace_back(open.back(), i);
                open.pop_back();
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<std::pair<std::size_t, std::size_t>> cut;
    for (const auto& [o, c] : pairs) {
        if (!cut.empty() && o < cut.back().second)
            continue;  // nested inside a group already being removed
        if (references_regulation(text.substr(o + 1, c - o - 1)))
            cut.emplace_back(o, c);
    }
    if (cut.empty())
        return std::string(text);

    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    for (const auto& [o, c] : cut) {
        out.append(text.substr(pos, o - pos));
        pos = c + 1;
    }
    out.append(text.substr(pos));
    return out;
}

TokenizedDoc tokenize(std::string_view text, std::string doc_id) {
    TokenizedDoc doc;
    doc.doc_id = std::move(doc_id);
    std::string cur;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode_utf8(text, i);
        if (is_space_cp(cp) || is_punct_cp(cp)) {
            if (!cur.empty()) {
                doc.tokens.push_back(std::move(cur));
                cur.clear();
            }
            continue;
        }
        append_utf8(cur, lower_cp(cp));
    }
    if (!cur.empty())
        doc.tokens.push_back(std::move(cur));
    return doc;
}

std::vector<LabelEntry> parse_label_corpus(const std::string& path, CorpusStats* stats) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open corpus file: " + path);

    std::vector<LabelEntry> entries;
    std::unordered_set<std::string> seen;
    CorpusStats local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            ++local.blank_lines;
            continue;
        }
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
        }
        LabelEntry entry;
        entry.label_id = require_string(rec, "label_id", line_no, path);
        entry.name = require_string(rec, "name", line_no, path);
        entry.raw_description = require_string(rec, "description", line_no, path);
        if (entry.label_id.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": empty label_id");
        if (!seen.insert(entry.label_id).second)
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate label_id '" +
                            entry.label_id + "'");
        entry.description = strip_regulation_refs(entry.raw_description);
        if (entry.description != entry.raw_description)
            ++local.stripped_descriptions;
        if (tokenize(entry.description).tokens.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": label '" + entry.label_id +
                            "': description empty after cleaning");
        entries.push_back(std::move(entry));
    }
    if (entries.empty())
        throw DataError("empty corpus: " + path);
    local.records = entries.size();
    if (stats)
        *stats = local;
    return entries;
}

std::vector<TargetRecord> parse_target_set(const std::string& path,
                                           const std::vector<LabelEntry>& corpus) {
    std::unordered_set<std::string> label_ids;
    label_ids.reserve(corpus.size());
    for (const auto& e : corpus)
        label_ids.insert(e.label_id);

    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open target file: " + path);

    std::vector<TargetRecord> targets;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
        }
        TargetRecord t;
        t.target_id = require_string(rec, "target_id", line_no, path);
        t.gold_label_id = require_string(rec, "gold_label_id", line_no, path);
        t.description = strip_regulation_refs(require_string(rec, "description", line_no, path));
        if (const auto it = rec.find("mislabel_flag"); it != rec.end() && !it->is_null()) {
            if (!it->is_boolean())
                throw DataError(path + ":" + std::to_string(line_no) + ": mislabel_flag must be boolean");
            t.mislabel_flag = it->get<bool>();
        }
        if (!seen.insert(t.target_id).second)
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate target_id '" +
                            t.target_id + "'");
        if (label_ids.find(t.gold_label_id) == label_ids.end())
            throw DataError("target '" + t.target_id + "': gold_label_id '" + t.gold_label_id +
                            "' not found in label corpus");
        t.word_count = tokenize(t.description).tokens.size();
        targets.push_back(std::move(t));
    }
    return targets;
}

void write_label_corpus(const std::vector<LabelEntry>& entries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write corpus file: " + path);
    for (const auto& e : entries) {
        json rec;
        rec["label_id"] = e.label_id;
        rec["name"] = e.name;
        rec["description"] = e.raw_description;
        out << rec.dump() << '\n';
    }
}

}  // namespace labelrank
