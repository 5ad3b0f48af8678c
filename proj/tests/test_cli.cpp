#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support/synthetic.hpp"

namespace fs = std::filesystem;

#ifndef LABELRANK_BIN_PATH
#error "LABELRANK_BIN_PATH must point at the labelrank binary"
#endif

namespace {

struct RunOutcome {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "labelrank_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunOutcome run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(LABELRANK_BIN_PATH) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out), slurp(err)};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

// A tiny deterministic fixture with planted one-hot word vectors.
void write_tiny_fixture(const fs::path& dir) {
    write_file(dir / "corpus.jsonl",
               R"({"label_id":"868.5320","name":"Reservoir bag","description":"flexible bag reservoir gas mixture"})"
               "\n"
               R"({"label_id":"868.5340","name":"Nasal cannula","description":"two prong cannula oxygen nose"})"
               "\n"
               R"({"label_id":"876.1500","name":"Endoscope","description":"endoscope optical tube body cavity"})"
               "\n");
    write_file(dir / "targets.jsonl",
               R"({"target_id":"t1","description":"a reservoir bag holding gas","gold_label_id":"868.5320"})"
               "\n"
               R"({"target_id":"t2","description":"oxygen cannula with prong","gold_label_id":"868.5340"})"
               "\n"
               R"({"target_id":"t3","description":"optical endoscope tube","gold_label_id":"876.1500","mislabel_flag":true})"
               "\n");
    // one-hot-ish vectors grouped by topic
    std::ostringstream vec;
    const char* bag_words[] = {"flexible", "bag", "reservoir", "gas", "mixture", "holding"};
    const char* cannula_words[] = {"two", "prong", "cannula", "oxygen", "nose"};
    const char* scope_words[] = {"endoscope", "optical", "tube", "body", "cavity"};
    vec << 16 << " 3\n";
    for (const char* w : bag_words)
        vec << w << " 1 0 0\n";
    for (const char* w : cannula_words)
        vec << w << " 0 1 0\n";
    for (const char* w : scope_words)
        vec << w << " 0 0 1\n";
    write_file(dir / "vectors.vec", vec.str());
    write_file(dir / "config.json", R"({
        "corpus": "corpus.jsonl",
        "targets": "targets.jsonl",
        "vectors": "vectors.vec",
        "stop_fraction": 0.9,
        "output_dir": "out"
    })");
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (const char c : s)
        if (c == '\n')
            ++n;
    return n;
}

}  // namespace

TEST_CASE("ingest summarizes a valid corpus and exits 0") {
    const auto dir = scratch("ingest_ok");
    write_tiny_fixture(dir);
    const auto r = run("ingest -c " + (dir / "config.json").string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("labels: 3") != std::string::npos);
    CHECK(r.out.find("targets: 3") != std::string::npos);
    CHECK(r.out.find("mislabeled: 1") != std::string::npos);
}

TEST_CASE("ingest failures map onto the exit-code contract") {
    const auto dir = scratch("ingest_bad");
    write_tiny_fixture(dir);

    auto r = run("ingest --corpus " + (dir / "missing.jsonl").string() + " --vectors " +
                     (dir / "vectors.vec").string(),
                 dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("missing.jsonl") != std::string::npos);

    write_file(dir / "dup.jsonl",
               R"({"label_id":"x.1","name":"a","description":"one two"})" "\n"
               R"({"label_id":"x.1","name":"b","description":"three four"})" "\n");
    r = run("ingest --corpus " + (dir / "dup.jsonl").string() + " --vectors " +
                (dir / "vectors.vec").string(),
            dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("x.1") != std::string::npos);

    r = run("ingest", dir);
    CHECK(r.exit_code == 1);  // no corpus configured -> usage error

    r = run("bogus-subcommand", dir);
    CHECK(r.exit_code == 1);
}

TEST_CASE("classify prints a header plus k rows of rank,label_id,name,score") {
    const auto dir = scratch("classify");
    write_tiny_fixture(dir);
    const auto cfg = (dir / "config.json").string();

    auto r = run("classify -c " + cfg + " -k 3 --text \"oxygen prong cannula\"", dir);
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r.out) == 4);
    CHECK(r.out.rfind("rank,label_id,name,score\n", 0) == 0);
    CHECK(r.out.find("1,868.5340,Nasal cannula,") != std::string::npos);

    r = run("classify -c " + cfg + " -k 1 --text \"reservoir bag gas\"", dir);
    CHECK(r.out.find("1,868.5320,") != std::string::npos);

    // scores carry six decimals
    const auto line_end = r.out.find_last_of('\n');
    const auto comma = r.out.find_last_of(',');
    CHECK(line_end - comma == 9);  // ",0.dddddd\n"

    r = run("classify -c " + cfg + " -k 15 --text \"oxygen\"", dir);
    CHECK(r.exit_code == 1);  // k > N

    r = run("classify -c " + cfg + " -k 1 --text \"zzz qqq\"", dir);
    CHECK(r.exit_code == 2);  // unembeddable query
    CHECK(r.err.find("zzz") != std::string::npos);
}

TEST_CASE("build persists a replayable index, and evaluation round-trips through it") {
    const auto dir = scratch("build");
    write_tiny_fixture(dir);
    const auto cfg = (dir / "config.json").string();

    auto r = run("build -c " + cfg, dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "label_embeddings.vec"));
    CHECK(fs::exists(dir / "out" / "target_embeddings.vec"));
    CHECK(fs::exists(dir / "out" / "lexicon.json"));
    CHECK(fs::exists(dir / "out" / "stopwords.txt"));
    const auto vec_text = slurp(dir / "out" / "label_embeddings.vec");
    CHECK(vec_text.rfind("3 3", 0) == 0);

    r = run("evaluate -c " + cfg, dir);
    REQUIRE(r.exit_code == 0);
    const auto bag_csv = slurp(dir / "out" / "per_target.csv");

    // replay the emitted embeddings through the precomputed backend
    write_file(dir / "replay.json", R"({
        "corpus": "corpus.jsonl",
        "targets": "targets.jsonl",
        "precomputed": {"labels": "out/label_embeddings.vec", "targets": "out/target_embeddings.vec"},
        "output_dir": "replay_out"
    })");
    r = run("evaluate -c " + (dir / "replay.json").string(), dir);
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(dir / "replay_out" / "per_target.csv") == bag_csv);
}

TEST_CASE("evaluate emits a deterministic report and per-target rows") {
    const auto dir = scratch("evaluate");
    write_tiny_fixture(dir);
    const auto cfg = (dir / "config.json").string();

    const auto first = run("evaluate -c " + cfg, dir);
    REQUIRE(first.exit_code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["backend_id"] == "bag_of_vectors");
    CHECK(report["n_labels"] == 3);
    CHECK(report["n_correct"] == 2);
    CHECK(report["n_mislabeled"] == 1);
    CHECK(report["avg_rank_correct"] == 1.0);
    CHECK(report["random_baseline"] == 2.0);
    // hit@N present and 1.0
    bool saw_hit_at_n = false;
    for (const auto& row : report["hit_at_k"])
        if (row[0] == 3) {
            CHECK(row[1] == 1.0);
            saw_hit_at_n = true;
        }
    CHECK(saw_hit_at_n);

    const auto csv = slurp(dir / "out" / "per_target.csv");
    CHECK(csv.rfind("target_id,word_count,gold_rank,flagged\n", 0) == 0);
    CHECK(count_lines(csv) == 4);
    CHECK(csv.find("t1,5,1,0") != std::string::npos);

    // byte-identical across runs
    const auto report_bytes = slurp(dir / "out" / "report.json");
    const auto second = run("evaluate -c " + cfg + " --out " + (dir / "out2").string(), dir);
    REQUIRE(second.exit_code == 0);
    CHECK(slurp(dir / "out2" / "report.json") == report_bytes);
    CHECK(slurp(dir / "out2" / "per_target.csv") == csv);
    CHECK(first.out == second.out);
}

TEST_CASE("a 30-target set with 3 flagged shows the split in the report header") {
    const auto dir = scratch("thirty");
    testsupport::SynthOptions opt;
    opt.n_labels = 30;
    opt.seed = 505;
    opt.reassigned = {{3, 18}, {11, 25}, {22, 7}};
    const auto data = testsupport::make_synthetic(opt);
    testsupport::write_corpus_jsonl(data, (dir / "corpus.jsonl").string());
    testsupport::write_targets_jsonl(data, (dir / "targets.jsonl").string());
    testsupport::write_vector_file(*data.table, (dir / "vectors.vec").string());
    write_file(dir / "config.json",
               R"({"corpus":"corpus.jsonl","targets":"targets.jsonl","vectors":"vectors.vec"})");

    const auto r = run("evaluate -c " + (dir / "config.json").string() + " --hit-k 2,7", dir);
    REQUIRE(r.exit_code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["n_labels"] == 30);
    CHECK(report["n_correct"] == 27);
    CHECK(report["n_mislabeled"] == 3);
    CHECK(report["random_baseline"] == 15.5);
    // flag overrides the config k list; 100 and N are always reported
    std::vector<std::size_t> ks;
    for (const auto& row : report["hit_at_k"])
        ks.push_back(row[0].get<std::size_t>());
    CHECK(ks == std::vector<std::size_t>{2, 7, 30, 100});
}

TEST_CASE("stopwords emits the curve as CSV and writes the list") {
    const auto dir = scratch("stopwords");
    write_tiny_fixture(dir);
    // "bag" appears in the corpus once; glue words appear often in a larger corpus,
    // so use a fixture where one token spans all documents
    write_file(dir / "c2.jsonl",
               R"({"label_id":"a.1","name":"a","description":"device bag gas"})" "\n"
               R"({"label_id":"a.2","name":"b","description":"device cannula"})" "\n"
               R"({"label_id":"a.3","name":"c","description":"device scope"})" "\n");
    const auto r = run("stopwords --corpus " + (dir / "c2.jsonl").string() + " --vectors " +
                           (dir / "vectors.vec").string() + " --grid 0.3,0.5,1.0" + " --out " +
                           (dir / "sw_out").string() + " --stop-fraction 0.5",
                       dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "theta,remaining_vocab\n0.3,0\n0.5,4\n1,5\n");
    const auto list = slurp(dir / "sw_out" / "stopwords.txt");
    CHECK(list == "device\n");
}

TEST_CASE("classify reads the description from stdin when no flag is given") {
    const auto dir = scratch("classify_stdin");
    write_tiny_fixture(dir);
    const fs::path out = dir / "stdout.txt";
    const std::string cmd = "echo \"optical endoscope tube\" | " +
                            std::string(LABELRANK_BIN_PATH) + " classify -c " +
                            (dir / "config.json").string() + " -k 1 > " + out.string() +
                            " 2> /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(out).find("1,876.1500,Endoscope,") != std::string::npos);
}

TEST_CASE("an unreachable provider exits with the transport code") {
    const auto dir = scratch("transport");
    write_tiny_fixture(dir);
    write_file(dir / "provider.json", R"({
        "corpus": "corpus.jsonl",
        "backend": "external",
        "provider": {"url": "http://127.0.0.1:1/embed", "model": "m",
                     "max_retries": 0, "initial_backoff_ms": 1, "timeout_ms": 200}
    })");
    const auto r = run("build -c " + (dir / "provider.json").string() + " --out " +
                           (dir / "out").string(),
                       dir);
    CHECK(r.exit_code == 3);
}

TEST_CASE("stats computes r and p from flags or series") {
    const auto dir = scratch("stats");
    auto r = run("stats --r -0.15185 --n 25", dir);
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["p"].get<double>() == doctest::Approx(0.4687).epsilon(1e-3));

    r = run("stats --x 1,2,3,4 --y 2,1,4,3", dir);
    REQUIRE(r.exit_code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["r"].get<double>() == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(j["p"].get<double>() == doctest::Approx(0.4).epsilon(1e-12));

    r = run("stats --r 0.5 --n 2", dir);
    CHECK(r.exit_code == 1);

    r = run("stats --x 1,1,1 --y 1,2,3", dir);
    CHECK(r.exit_code == 2);  // constant series is a data error
}
