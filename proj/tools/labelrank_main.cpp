#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "labelrank/config.hpp"
#include "labelrank/corpus.hpp"
#include "labelrank/embed.hpp"
#include "labelrank/errors.hpp"
#include "labelrank/eval.hpp"
#include "labelrank/lexicon.hpp"
#include "labelrank/provider.hpp"
#include "labelrank/rank.hpp"
#include "labelrank/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace labelrank;

struct CommonFlags {
    std::string config_path;
    std::string corpus_path;
    std::string targets_path;
    std::string vectors_path;
    std::string output_dir;
    double stop_fraction = -1.0;      // < 0 = not set
    long long mislabel_threshold = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("-c,--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--corpus", flags.corpus_path, "label corpus file (overrides config)");
    cmd->add_option("--targets", flags.targets_path, "target set file (overrides config)");
    cmd->add_option("--vectors", flags.vectors_path, "word-vector file (overrides config)");
    cmd->add_option("--out", flags.output_dir, "output directory (overrides config)");
    cmd->add_option("--stop-fraction", flags.stop_fraction, "stop-word fraction theta");
    cmd->add_option("--threshold", flags.mislabel_threshold, "mislabel rank threshold");
}

RunConfig effective_config(const CommonFlags& flags, bool require_backend = true) {
    RunConfig cfg;
    if (!flags.config_path.empty())
        cfg = RunConfig::from_file(flags.config_path);
    if (!flags.corpus_path.empty())
        cfg.corpus_path = flags.corpus_path;
    if (!flags.targets_path.empty())
        cfg.targets_path = flags.targets_path;
    if (!flags.vectors_path.empty()) {
        cfg.vectors_path = flags.vectors_path;
        cfg.backend = BackendKind::bag_of_vectors;
    }
    if (!flags.output_dir.empty())
        cfg.output_dir = flags.output_dir;
    if (flags.stop_fraction >= 0.0)
        cfg.stop_fraction = flags.stop_fraction;
    if (flags.mislabel_threshold >= 0)
        cfg.mislabel_threshold = static_cast<std::size_t>(flags.mislabel_threshold);
    cfg.validate(require_backend);
    return cfg;
}

struct LoadedCorpus {
    std::vector<LabelEntry> labels;
    std::vector<TokenizedDoc> docs;
    CorpusStats stats;
};

LoadedCorpus load_corpus(const RunConfig& cfg) {
    LoadedCorpus loaded;
    loaded.labels = parse_label_corpus(cfg.corpus_path, &loaded.stats);
    loaded.docs.reserve(loaded.labels.size());
    for (const auto& e : loaded.labels)
        loaded.docs.push_back(tokenize(e.description, e.label_id));
    return loaded;
}

std::unique_ptr<EmbeddingBackend> make_backend(const RunConfig& cfg, const LoadedCorpus& corpus) {
    switch (cfg.backend) {
        case BackendKind::bag_of_vectors: {
            auto table = std::make_shared<WordVectorTable>(load_word_vectors(cfg.vectors_path));
            auto lexicon = build_lexicon(corpus.docs, cfg.stop_fraction);
            return std::make_unique<BagOfVectorsBackend>(std::move(table), std::move(lexicon));
        }
        case BackendKind::external:
            return std::make_unique<ExternalBackend>(cfg.provider);
        case BackendKind::precomputed: {
            auto labels = PrecomputedStore::load(cfg.precomputed_labels_path);
            std::optional<PrecomputedStore> targets;
            if (!cfg.precomputed_targets_path.empty())
                targets = PrecomputedStore::load(cfg.precomputed_targets_path);
            return std::make_unique<PrecomputedBackend>(std::move(labels), std::move(targets));
        }
    }
    throw UsageError("no backend configured");
}

std::vector<std::pair<std::string, SentenceEmbedding>> embed_documents(
    const RunConfig& cfg, EmbeddingBackend& backend, const std::vector<std::string>& ids,
    const std::vector<std::string>& texts, Role role, const char* what) {
    std::vector<std::pair<std::string, SentenceEmbedding>> rows;
    rows.reserve(ids.size());
    if (cfg.backend == BackendKind::external) {
        auto embeddings = backend.embed_batch(ids, texts, role);
        for (std::size_t i = 0; i < ids.size(); ++i)
            rows.emplace_back(ids[i], std::move(embeddings[i]));
        return rows;
    }
    // One at a time, so every unembeddable document can be reported at once.
    std::vector<std::string> failed;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        try {
            rows.emplace_back(ids[i], backend.embed(ids[i], texts[i], role));
        } catch (const DataError&) {
            failed.push_back(ids[i]);
        }
    }
    if (!failed.empty()) {
        std::string msg = std::string("unembeddable ") + what + "s:";
        for (const auto& id : failed)
            msg += " " + id;
        throw DataError(msg);
    }
    return rows;
}

std::vector<std::pair<std::string, SentenceEmbedding>> embed_labels(
    const RunConfig& cfg, EmbeddingBackend& backend, const LoadedCorpus& corpus) {
    std::vector<std::string> ids, texts;
    ids.reserve(corpus.labels.size());
    texts.reserve(corpus.labels.size());
    for (const auto& e : corpus.labels) {
        ids.push_back(e.label_id);
        texts.push_back(e.description);
    }
    return embed_documents(cfg, backend, ids, texts, Role::document, "label");
}

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    return buf;
}

void ensure_output_dir(const RunConfig& cfg) {
    if (!cfg.output_dir.empty())
        fs::create_directories(cfg.output_dir);
}

std::vector<std::size_t> parse_size_list(const std::string& csv, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
        out.push_back(std::stoul(item));
    }
    if (out.empty())
        throw UsageError(std::string("empty ") + what + " list");
    return out;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty())
        throw UsageError(std::string("empty ") + what + " list");
    return out;
}

int cmd_ingest(const CommonFlags& flags) {
    const RunConfig cfg = effective_config(flags, /*require_backend=*/false);
    const LoadedCorpus corpus = load_corpus(cfg);
    std::cout << "labels: " << corpus.stats.records << "\n"
              << "descriptions with regulation references stripped: "
              << corpus.stats.stripped_descriptions << "\n"
              << "blank lines skipped: " << corpus.stats.blank_lines << "\n";
    if (!cfg.targets_path.empty()) {
        const auto targets = parse_target_set(cfg.targets_path, corpus.labels);
        std::size_t flagged = 0;
        for (const auto& t : targets)
            if (t.mislabel_flag.value_or(false))
                ++flagged;
        std::cout << "targets: " << targets.size() << " (annotated mislabeled: " << flagged
                  << ")\n";
    }
    return 0;
}

int cmd_build(const CommonFlags& flags) {
    const RunConfig cfg = effective_config(flags);
    const LoadedCorpus corpus = load_corpus(cfg);
    auto backend = make_backend(cfg, corpus);
    if (const auto* bag = dynamic_cast<const BagOfVectorsBackend*>(backend.get());
        bag && bag->table().duplicate_count > 0)
        std::cerr << "warning: " << bag->table().duplicate_count
                  << " duplicate words in the vector file (last occurrence kept)\n";
    const auto rows = embed_labels(cfg, *backend, corpus);

    ensure_output_dir(cfg);
    const fs::path out(cfg.output_dir);
    write_precomputed(rows, (out / "label_embeddings.vec").string());

    // With the target side persisted too, any backend's run replays through
    // the precomputed backend.
    if (!cfg.targets_path.empty()) {
        const auto targets = parse_target_set(cfg.targets_path, corpus.labels);
        std::vector<std::string> ids, texts;
        for (const auto& t : targets) {
            ids.push_back(t.target_id);
            texts.push_back(t.description);
        }
        const auto target_rows =
            embed_documents(cfg, *backend, ids, texts, Role::query, "target");
        write_precomputed(target_rows, (out / "target_embeddings.vec").string());
    }

    const auto lexicon = build_lexicon(corpus.docs, cfg.stop_fraction);
    {
        json j;
        j["doc_count"] = lexicon.doc_count;
        j["stop_fraction"] = lexicon.stop_fraction;
        auto& df = j["df"] = json::object();
        for (const auto& [token, freq] : lexicon.df)
            df[token] = freq;
        std::ofstream f(out / "lexicon.json", std::ios::binary);
        f << j.dump(2) << '\n';
    }
    {
        std::vector<std::string> stopwords(lexicon.stopwords.begin(), lexicon.stopwords.end());
        std::sort(stopwords.begin(), stopwords.end());
        std::ofstream f(out / "stopwords.txt", std::ios::binary);
        for (const auto& w : stopwords)
            f << w << '\n';
    }
    std::cout << "wrote " << rows.size() << " label embeddings (dim "
              << (rows.empty() ? 0 : rows.front().second.dim()) << ") to "
              << (out / "label_embeddings.vec").string() << "\n";
    return 0;
}

int cmd_classify(const CommonFlags& flags, std::string text, std::size_t k) {
    const RunConfig cfg = effective_config(flags);
    if (cfg.backend == BackendKind::precomputed)
        throw UsageError("the precomputed backend cannot embed ad-hoc text; "
                         "use bag_of_vectors or an external provider");
    const LoadedCorpus corpus = load_corpus(cfg);
    auto backend = make_backend(cfg, corpus);
    const auto index = SimilarityIndex::build(embed_labels(cfg, *backend, corpus));
    if (k < 1 || k > index.size())
        throw UsageError("k must lie in [1, " + std::to_string(index.size()) + "], got " +
                         std::to_string(k));

    if (text.empty()) {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        text = buffer.str();
    }
    const std::string cleaned = strip_regulation_refs(text);
    const auto query = backend->embed("query", cleaned, Role::query);
    const auto ranking = rank_labels(query, index);

    std::unordered_map<std::string, const LabelEntry*> names;
    for (const auto& e : corpus.labels)
        names.emplace(e.label_id, &e);

    std::cout << "rank,label_id,name,score\n";
    const auto top = ranking.top_k(k);
    for (std::size_t i = 0; i < top.size(); ++i)
        std::cout << (i + 1) << ',' << top[i].label_id << ',' << names.at(top[i].label_id)->name
                  << ',' << format_score(top[i].score) << "\n";
    return 0;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& hit_k_csv) {
    RunConfig cfg = effective_config(flags);
    if (!hit_k_csv.empty())
        cfg.hit_k = parse_size_list(hit_k_csv, "--hit-k");
    if (cfg.targets_path.empty())
        throw UsageError("evaluate needs a targets file");
    const LoadedCorpus corpus = load_corpus(cfg);
    const auto targets = parse_target_set(cfg.targets_path, corpus.labels);
    auto backend = make_backend(cfg, corpus);
    const auto index = SimilarityIndex::build(embed_labels(cfg, *backend, corpus));

    std::vector<RankResult> results;
    results.reserve(targets.size());
    const std::size_t k = std::min<std::size_t>(15, index.size());
    for (const auto& t : targets) {
        const auto query = backend->embed(t.target_id, t.description, Role::query);
        const auto ranking = rank_labels(query, index);
        results.push_back(make_rank_result(ranking, t.target_id, t.gold_label_id, k));
    }

    auto report = evaluate(results, targets, cfg.hit_k, backend->backend_id());
    const auto verdicts = detect_mislabels(results, cfg.mislabel_threshold);
    std::unordered_map<std::string, bool> flagged;
    for (const auto& v : verdicts)
        flagged.emplace(v.target_id, v.flagged);

    json j = to_json(report);
    j["mislabel_threshold"] = cfg.mislabel_threshold;
    std::size_t n_flagged = 0;
    for (const auto& v : verdicts)
        if (v.flagged)
            ++n_flagged;
    j["flagged_by_threshold"] = n_flagged;
    const std::string report_text = j.dump(2) + "\n";

    ensure_output_dir(cfg);
    const fs::path out(cfg.output_dir);
    {
        std::ofstream f(out / "report.json", std::ios::binary);
        f << report_text;
    }
    {
        std::unordered_map<std::string, const RankResult*> by_id;
        for (const auto& r : results)
            by_id.emplace(r.target_id, &r);
        std::ofstream f(out / "per_target.csv", std::ios::binary);
        f << "target_id,word_count,gold_rank,flagged\n";
        for (const auto& t : targets)
            f << t.target_id << ',' << t.word_count << ',' << by_id.at(t.target_id)->gold_rank
              << ',' << (flagged.at(t.target_id) ? 1 : 0) << "\n";
    }
    std::cout << report_text;
    return 0;
}

int cmd_stopwords(const CommonFlags& flags, const std::string& grid_csv) {
    const RunConfig cfg = effective_config(flags, /*require_backend=*/false);
    const LoadedCorpus corpus = load_corpus(cfg);

    std::vector<double> grid;
    if (grid_csv.empty()) {
        for (int i = 1; i <= 20; ++i)
            grid.push_back(static_cast<double>(i) * 0.05);
    } else {
        grid = parse_double_list(grid_csv, "theta grid");
    }
    const auto curve = stopword_curve(corpus.docs, grid);
    std::cout << "theta,remaining_vocab\n";
    for (const auto& [theta, remaining] : curve) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", theta);
        std::cout << buf << ',' << remaining << "\n";
    }

    const auto lexicon = build_lexicon(corpus.docs, cfg.stop_fraction);
    std::vector<std::string> stopwords(lexicon.stopwords.begin(), lexicon.stopwords.end());
    std::sort(stopwords.begin(), stopwords.end());
    ensure_output_dir(cfg);
    const fs::path list_path = fs::path(cfg.output_dir) / "stopwords.txt";
    std::ofstream f(list_path, std::ios::binary);
    for (const auto& w : stopwords)
        f << w << '\n';
    std::cerr << "stop-word list (theta=" << cfg.stop_fraction << ", " << stopwords.size()
              << " tokens) written to " << list_path.string() << "\n";
    return 0;
}

int cmd_stats(double r_flag, long long n_flag, const std::string& x_csv,
              const std::string& y_csv) {
    json j;
    if (!x_csv.empty() || !y_csv.empty()) {
        if (x_csv.empty() || y_csv.empty())
            throw UsageError("stats needs both --x and --y");
        const auto x = parse_double_list(x_csv, "--x");
        const auto y = parse_double_list(y_csv, "--y");
        const double r = pearson_r(x, y);
        j["n"] = x.size();
        j["r"] = r;
        j["p"] = t_test_two_sided(r, x.size());
    } else {
        if (n_flag < 3)
            throw UsageError("stats needs --n >= 3 (or --x/--y series)");
        j["n"] = n_flag;
        j["r"] = r_flag;
        j["p"] = t_test_two_sided(r_flag, static_cast<std::size_t>(n_flag));
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"labelrank: rank regulatory category labels against device descriptions"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* ingest = app.add_subcommand("ingest", "parse and summarize the corpus and target set");
    add_common_flags(ingest, flags);

    auto* build = app.add_subcommand("build", "embed all labels and persist a replayable index");
    add_common_flags(build, flags);

    auto* classify = app.add_subcommand("classify", "rank labels for one description");
    add_common_flags(classify, flags);
    std::string classify_text;
    std::size_t classify_k = 15;
    classify->add_option("-t,--text", classify_text, "description text (default: stdin)");
    classify->add_option("-k", classify_k, "number of rows to print");

    auto* evaluate = app.add_subcommand("evaluate", "rank every target and report metrics");
    add_common_flags(evaluate, flags);
    std::string hit_k_csv;
    evaluate->add_option("--hit-k", hit_k_csv, "comma-separated k list for hit@k");

    auto* stopwords = app.add_subcommand("stopwords", "emit the stop-word curve and list");
    add_common_flags(stopwords, flags);
    std::string grid_csv;
    stopwords->add_option("--grid", grid_csv, "comma-separated theta grid");

    auto* stats = app.add_subcommand("stats", "Pearson r and two-sided t-test");
    double r_flag = 0.0;
    long long n_flag = 0;
    std::string x_csv, y_csv;
    stats->add_option("--r", r_flag, "correlation coefficient");
    stats->add_option("--n", n_flag, "sample count");
    stats->add_option("--x", x_csv, "comma-separated series");
    stats->add_option("--y", y_csv, "comma-separated series");

    try {
        app.parse(argc, argv);
        if (*ingest)
            return cmd_ingest(flags);
        if (*build)
            return cmd_build(flags);
        if (*classify)
            return cmd_classify(flags, classify_text, classify_k);
        if (*evaluate)
            return cmd_evaluate(flags, hit_k_csv);
        if (*stopwords)
            return cmd_stopwords(flags, grid_csv);
        if (*stats)
            return cmd_stats(r_flag, n_flag, x_csv, y_csv);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const labelrank::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
