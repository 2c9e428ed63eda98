#include <truewalks/pipeline.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace truewalks;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per test case, removed up front so reruns are clean
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("truewalks_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig small_config(const fs::path& dir) {
    PipelineConfig cfg;
    cfg.out = dir.string();
    cfg.seed = 7;
    cfg.embedding.dim = 8;
    cfg.embedding.epochs = 2;
    cfg.synth.n_entities = 24;
    cfg.synth.n_pairs = 40;
    return cfg;
}

// synth into the directory and point the input paths at the result
PipelineConfig seeded_inputs(const fs::path& dir) {
    auto cfg = small_config(dir);
    run(std::string("synth"), cfg);
    cfg.ontology = (dir / "ontology.nt").string();
    cfg.annotations = (dir / "annotations.tsv").string();
    cfg.pairs = (dir / "pairs.tsv").string();
    return cfg;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        files[entry.path().filename().string()] = read_file(entry.path().string());
    }
    return files;
}

}  // namespace

TEST_CASE("parse_config_text handles comments, blanks, and bad lines") {
    const auto kv = parse_config_text(
        "# comment\n"
        "\n"
        "mode = merged_polarity\n"
        "walk.max_depth=6\r\n"
        "  seed =  9  \n");
    CHECK(kv.at("mode") == "merged_polarity");
    CHECK(kv.at("walk.max_depth") == "6");
    CHECK(kv.at("seed") == "9");

    CHECK_THROWS_AS(parse_config_text("mode truewalks\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("=value\n"), std::invalid_argument);
}

TEST_CASE("apply_config sets every section and rejects unknown keys") {
    PipelineConfig cfg;
    apply_config(cfg, {{"ontology", "o.nt"},
                       {"annotations", "a.tsv"},
                       {"pairs", "p.tsv"},
                       {"out", "results"},
                       {"mode", "positive_only"},
                       {"seed", "123"},
                       {"workers", "4"},
                       {"deterministic", "false"},
                       {"walk.max_walks", "50"},
                       {"walk.max_depth", "6"},
                       {"embedding.dim", "32"},
                       {"embedding.window", "3"},
                       {"embedding.epochs", "7"},
                       {"embedding.noise_k", "9"},
                       {"embedding.learning_rate", "0.05"},
                       {"embedding.min_count", "2"},
                       {"embedding.order_aware", "true"},
                       {"eval.mccv", "12"},
                       {"eval.beta", "0.25"},
                       {"eval.alpha", "0.01"},
                       {"synth.n_classes", "15"},
                       {"synth.branching", "3"},
                       {"synth.depth", "3"},
                       {"synth.n_entities", "20"},
                       {"synth.n_annotations", "2"},
                       {"synth.n_pairs", "30"},
                       {"synth.signal", "0.7"}});
    CHECK(cfg.ontology == "o.nt");
    CHECK(cfg.annotations == "a.tsv");
    CHECK(cfg.pairs == "p.tsv");
    CHECK(cfg.out == "results");
    CHECK(cfg.mode == "positive_only");
    CHECK(cfg.seed == 123);
    CHECK(cfg.workers == 4);
    CHECK_FALSE(cfg.deterministic);
    CHECK(cfg.walk.max_walks == 50);
    CHECK(cfg.walk.max_depth == 6);
    CHECK(cfg.embedding.dim == 32);
    CHECK(cfg.embedding.window == 3);
    CHECK(cfg.embedding.epochs == 7);
    CHECK(cfg.embedding.noise_k == 9);
    CHECK(cfg.embedding.learning_rate == 0.05);
    CHECK(cfg.embedding.min_count == 2);
    CHECK(cfg.embedding.order_aware);
    CHECK(cfg.eval.mccv_repetitions == 12);
    CHECK(cfg.eval.beta == 0.25);
    CHECK(cfg.eval.alpha == 0.01);
    CHECK(cfg.synth.n_classes == 15);
    CHECK(cfg.synth.branching == 3);
    CHECK(cfg.synth.depth == 3);
    CHECK(cfg.synth.n_entities == 20);
    CHECK(cfg.synth.n_annotations == 2);
    CHECK(cfg.synth.n_pairs == 30);
    CHECK(cfg.synth.signal == 0.7);

    CHECK_THROWS_AS(apply_config(cfg, {{"walk.maxdepth", "4"}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_config(cfg, {{"seed", "abc"}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_config(cfg, {{"eval.beta", "often"}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_config(cfg, {{"deterministic", "yes"}}), std::invalid_argument);
}

TEST_CASE("env_seed parses TRUEWALKS_SEED and rejects garbage") {
    unsetenv("TRUEWALKS_SEED");
    CHECK_FALSE(env_seed().has_value());
    setenv("TRUEWALKS_SEED", "99", 1);
    CHECK(env_seed() == std::uint64_t{99});
    setenv("TRUEWALKS_SEED", "9x", 1);
    CHECK_THROWS_AS(env_seed(), std::invalid_argument);
    unsetenv("TRUEWALKS_SEED");
}

TEST_CASE("config_hash is stable and sensitive to every field") {
    PipelineConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.embedding.dim = 64;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.mode = "positive_only";
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("pipeline command emits every artifact with a 30-split report") {
    const auto dir = scratch("pipeline_smoke");
    auto cfg = seeded_inputs(dir);
    const auto written = run(std::string("pipeline"), cfg);

    for (const char* name : {"walks.txt", "embedding_positive.txt", "embedding_negative.txt",
                             "embeddings.tsv", "report.json", "similarity.csv",
                             "manifest_walk.json", "manifest_train.json", "manifest_fuse.json",
                             "manifest_pipeline.json"}) {
        CHECK(fs::exists(dir / name));
    }
    CHECK(written.size() >= 10);

    const auto report = nlohmann::json::parse(read_file((dir / "report.json").string()));
    CHECK(report["per_split"].size() == 30);  // default MCCV repetitions
    CHECK(report["ranking"].is_object());
    CHECK(report["ranking"]["auc"].is_number());

    // fused width is twice the per-polarity width
    const auto header = read_file((dir / "embeddings.tsv").string());
    CHECK(header.substr(0, header.find('\n')) == "24 16");

    // corpus is polarity-prefixed
    const auto walks = read_file((dir / "walks.txt").string());
    CHECK(walks.rfind("P|", 0) == 0);
    CHECK(walks.find("\nN|") != std::string::npos);
}

TEST_CASE("rerunning any stage reproduces byte-identical artifacts") {
    const auto dir = scratch("pipeline_rerun");
    auto cfg = seeded_inputs(dir);
    run(std::string("pipeline"), cfg);
    const auto first = dir_contents(dir);
    run(std::string("pipeline"), cfg);
    const auto second = dir_contents(dir);
    CHECK(first == second);

    // spec'd example: the walk stage alone, twice, byte-equal
    const auto before = read_file((dir / "walks.txt").string());
    run(std::string("walk"), cfg);
    CHECK(read_file((dir / "walks.txt").string()) == before);

    // a different seed changes the corpus
    auto other = cfg;
    other.seed = 8;
    run(std::string("walk"), other);
    CHECK(read_file((dir / "walks.txt").string()) != before);
}

TEST_CASE("worker count does not change any artifact") {
    const auto dir1 = scratch("pipeline_w1");
    auto cfg1 = seeded_inputs(dir1);
    cfg1.workers = 1;
    run(std::string("pipeline"), cfg1);

    const auto dir4 = scratch("pipeline_w4");
    auto cfg4 = seeded_inputs(dir4);
    cfg4.workers = 4;
    run(std::string("pipeline"), cfg4);

    for (const char* name : {"walks.txt", "embedding_positive.txt", "embeddings.tsv",
                             "report.json", "similarity.csv"}) {
        CHECK(read_file((dir1 / name).string()) == read_file((dir4 / name).string()));
    }
}

TEST_CASE("positive_only trains one double-width model from positive walks") {
    const auto dir = scratch("pipeline_posonly");
    auto cfg = seeded_inputs(dir);
    cfg.mode = "positive_only";
    run(std::string("pipeline"), cfg);

    CHECK(fs::exists(dir / "embedding_positive.txt"));
    CHECK_FALSE(fs::exists(dir / "embedding_negative.txt"));
    const auto emb = read_file((dir / "embedding_positive.txt").string());
    const auto header = emb.substr(0, emb.find('\n'));
    CHECK(header.substr(header.find(' ') + 1) == "16");  // 2 * dim
    const auto table = read_file((dir / "embeddings.tsv").string());
    CHECK(table.substr(0, table.find('\n')) == "24 16");
}

TEST_CASE("merged_polarity rewrites negatives into not:-prefixed positive edges") {
    const auto dir = scratch("pipeline_merged");
    auto cfg = seeded_inputs(dir);
    cfg.mode = "merged_polarity";
    run(std::string("pipeline"), cfg);

    const auto walks = read_file((dir / "walks.txt").string());
    CHECK(walks.find("not:hasFunction") != std::string::npos);
    CHECK(walks.find("N|") == std::string::npos);        // no negative-status walks
    CHECK(walks.find("superClassOf") == std::string::npos);  // no direction flipping
    CHECK_FALSE(fs::exists(dir / "embedding_negative.txt"));
    const auto table = read_file((dir / "embeddings.tsv").string());
    CHECK(table.substr(0, table.find('\n')) == "24 16");
}

TEST_CASE("manifests carry hashes that match the artifacts and no timestamps") {
    const auto dir = scratch("pipeline_manifest");
    auto cfg = seeded_inputs(dir);
    run(std::string("walk"), cfg);

    const auto manifest =
        nlohmann::json::parse(read_file((dir / "manifest_walk.json").string()));
    CHECK(manifest["stage"] == "walk");
    CHECK(manifest["mode"] == "truewalks");
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["config_hash"] == config_hash(cfg));
    CHECK(manifest["config"]["embedding.dim"] == "8");
    CHECK(manifest["versions"]["truewalks"] == std::string(kVersion));
    for (const auto& key : {"time", "timestamp", "date", "created"}) {
        CHECK_FALSE(manifest.contains(key));
    }
    for (const auto& [name, hash] : manifest["outputs"].items()) {
        const auto content = read_file((dir / name).string());
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        CHECK(hash == std::string(buf));
    }
    CHECK(manifest["inputs"].size() == 2);  // ontology + annotations
}

TEST_CASE("run rejects unknown commands and missing inputs with one-line errors") {
    const auto dir = scratch("pipeline_errors");
    auto cfg = small_config(dir);
    CHECK_THROWS_AS(run(std::string("explode"), cfg), std::invalid_argument);

    cfg.ontology = (dir / "nope.nt").string();
    cfg.annotations = (dir / "nope.tsv").string();
    CHECK_THROWS_AS(run(std::string("walk"), cfg), std::runtime_error);

    cfg.mode = "sideways";
    CHECK_THROWS_AS(run(std::string("walk"), cfg), std::invalid_argument);
}

TEST_CASE("parse errors surface with file, line, and column") {
    const auto dir = scratch("pipeline_parse_errors");
    auto cfg = small_config(dir);
    write_file((dir / "bad.nt").string(), "<a> <b> .\n");
    write_file((dir / "ann.tsv").string(), "entity\tproperty\tclass\tpolarity\nE\tp\tC\tpos\n");
    cfg.ontology = (dir / "bad.nt").string();
    cfg.annotations = (dir / "ann.tsv").string();
    try {
        run(std::string("walk"), cfg);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("bad.nt:1:") != std::string::npos);
    }
}
