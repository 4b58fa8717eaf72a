#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ppaudit/corpus.hpp"
#include "ppaudit/util.hpp"

#include <filesystem>
#include <fstream>
#include <set>

using namespace ppaudit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ppaudit_corpus_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int & counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string & name, const std::string & content) {
        auto p = (path / name).string();
        write_text_file(p, content);
        return p;
    }
};

const char * kHateLines =
    R"({"id":"h1","tokens":["you","are","all","terrible"],"annotators":[{"label":"offensive","rationale":[0,0,0,1]},{"label":"offensive","rationale":[0,0,1,1]},{"label":"normal","rationale":[0,0,0,0]}],"targets":["Women"]})"
    "\n"
    R"({"id":"h2","tokens":["nice","day","here"],"annotators":[{"label":"normal"},{"label":"normal"},{"label":"normal"}],"targets":[]})"
    "\n"
    R"({"id":"h3","tokens":["some","post","text"],"annotators":[{"label":"normal"},{"label":"offensive","rationale":[1,0,0]},{"label":"hatespeech","rationale":[1,1,0]}],"targets":["Islam","African"]})"
    "\n";

}  // namespace

TEST_CASE("load hatexplain corpus") {
    TempDir dir;
    auto path = dir.file("hate.jsonl", kHateLines);
    auto instances = load_corpus(path, CorpusFormat::hatexplain_json);
    REQUIRE(instances.size() == 3);
    CHECK(instances[0].id == "h1");
    CHECK(instances[0].tokens.size() == 4);
    CHECK(instances[0].gold.count("ann0") == 1);
    CHECK(instances[0].gold.count("majority") == 1);
    CHECK(instances[0].gold.at("majority").label == 1);
    // token marked by >= 2 of 3 annotators
    CHECK(instances[0].gold.at("majority").rationale_mask == std::vector<uint8_t>{0, 0, 0, 1});
    CHECK(instances[0].targets == std::set<std::string>{"Women"});
    // h3 has three pairwise-distinct labels: no majority entry
    CHECK(instances[2].gold.count("majority") == 0);
    for (const auto & inst : instances) {
        for (const auto & [g, ann] : inst.gold) {
            CHECK(ann.rationale_mask.size() == inst.tokens.size());
        }
    }
}

TEST_CASE("mask length mismatch names the instance") {
    TempDir dir;
    auto path = dir.file("bad.jsonl",
                         R"({"id":"bad7","tokens":["a","b"],"annotators":[{"label":"normal","rationale":[0,1,1]}]})"
                         "\n");
    try {
        load_corpus(path, CorpusFormat::hatexplain_json);
        FAIL("expected ValidationError");
    } catch (const ValidationError & e) {
        CHECK(std::string(e.what()).find("bad7") != std::string::npos);
        CHECK(std::string(e.what()).find("rationale") != std::string::npos);
    }
}

TEST_CASE("load brwrr corpus with six groups") {
    TempDir dir;
    std::string line =
        R"({"id":"b1","tokens":["what","do","dogs","like"],"task":"cose","options":["bones","cats","rain"],"gold":{)";
    bool first = true;
    for (const auto & g : brwrr_groups()) {
        if (!first) line += ",";
        first = false;
        line += "\"" + g + "\":{\"label\":0,\"rationale\":[0,0,1,0]}";
    }
    line += "}}\n";
    auto path = dir.file("brwrr.jsonl", line);
    auto instances = load_corpus(path, CorpusFormat::brwrr_json);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].task == Task::cose);
    CHECK(instances[0].gold.size() == 6);
    CHECK(instances[0].options.size() == 3);
    CHECK(instances[0].canonical_gold().label == 0);
}

TEST_CASE("brwrr rejects unknown group and bad option label") {
    TempDir dir;
    auto bad_group = dir.file(
        "g.jsonl",
        R"({"id":"x","tokens":["t"],"task":"sst","gold":{"ZZ":{"label":"Positive"}}})" "\n");
    CHECK_THROWS_AS(load_corpus(bad_group, CorpusFormat::brwrr_json), ValidationError);

    auto bad_label = dir.file(
        "l.jsonl",
        R"({"id":"y","tokens":["t"],"task":"cose","options":["a","b"],"gold":{"BY":{"label":"zzz"}}})" "\n");
    CHECK_THROWS_AS(load_corpus(bad_label, CorpusFormat::brwrr_json), ValidationError);
}

TEST_CASE("filter hatexplain") {
    TempDir dir;
    auto path = dir.file("hate.jsonl", kHateLines);
    auto instances = load_corpus(path, CorpusFormat::hatexplain_json);
    auto kept = filter_hatexplain(instances);
    // h1: majority Offensive but only 2 rationale-bearing annotations -> dropped
    // h2: Normal with no rationales -> kept
    // h3: three distinct labels -> dropped
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "h2");
    CHECK(kept[0].gold.at("majority").label == 0);
}

TEST_CASE("filter keeps majority-vote gold") {
    TempDir dir;
    auto path = dir.file(
        "hate.jsonl",
        R"({"id":"k1","tokens":["a","b","c"],"annotators":[{"label":"hatespeech","rationale":[1,0,0]},{"label":"hatespeech","rationale":[1,1,0]},{"label":"offensive","rationale":[0,1,1]}],"targets":[]})"
        "\n");
    auto kept = filter_hatexplain(load_corpus(path, CorpusFormat::hatexplain_json));
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].gold.at("majority").label == 2);
}

TEST_CASE("sample subset is deterministic and order preserving") {
    std::vector<Instance> instances;
    for (int i = 0; i < 20; ++i) {
        Instance inst;
        inst.id = "i" + std::to_string(i);
        inst.task = Task::hate3;
        inst.tokens = {{0, "x"}};
        instances.push_back(inst);
    }
    auto a = sample_subset(instances, 7, 99);
    auto b = sample_subset(instances, 7, 99);
    REQUIRE(a.size() == 7);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
    // order preserved: indices strictly increasing in input order
    std::set<std::string> seen;
    size_t last = 0;
    bool ordered = true;
    for (const auto & inst : a) {
        size_t idx = std::stoul(inst.id.substr(1));
        if (!seen.empty() && idx <= last) ordered = false;
        last = idx;
        seen.insert(inst.id);
    }
    CHECK(ordered);
    CHECK(seen.size() == 7);

    auto full = sample_subset(instances, instances.size(), 1);
    CHECK(full.size() == instances.size());
    for (size_t i = 0; i < full.size(); ++i) CHECK(full[i].id == instances[i].id);

    auto other = sample_subset(instances, 7, 100);
    bool all_equal = true;
    for (size_t i = 0; i < a.size(); ++i) all_equal = all_equal && a[i].id == other[i].id;
    CHECK(!all_equal);  // different seed, different sample (overwhelmingly likely)

    CHECK_THROWS_AS(sample_subset(instances, 21, 1), ValidationError);
}

TEST_CASE("slice by target") {
    std::vector<Instance> instances;
    auto make = [](const std::string & id, std::set<std::string> targets) {
        Instance inst;
        inst.id = id;
        inst.task = Task::hate3;
        inst.tokens = {{0, "x"}};
        inst.targets = std::move(targets);
        return inst;
    };
    instances.push_back(make("g1", {"Women"}));
    instances.push_back(make("n1", {}));
    instances.push_back(make("m1", {"Islam", "African"}));
    instances.push_back(make("o1", {"Other"}));  // unmapped tag -> NoTarget

    auto slices = slice_by_target(instances);
    auto ids = [](const std::vector<Instance> & v) {
        std::set<std::string> out;
        for (const auto & i : v) out.insert(i.id);
        return out;
    };
    CHECK(ids(slices.at(kSliceGender)) == std::set<std::string>{"g1"});
    CHECK(ids(slices.at(kSliceReligion)) == std::set<std::string>{"m1"});
    CHECK(ids(slices.at(kSliceRace)) == std::set<std::string>{"m1"});
    CHECK(ids(slices.at(kSliceNoTarget)) == std::set<std::string>{"n1", "o1"});

    // union covers the input
    std::set<std::string> all;
    for (const auto & [name, insts] : slices) {
        for (const auto & i : insts) all.insert(i.id);
    }
    CHECK(all.size() == instances.size());
}

TEST_CASE("label normalization aliases") {
    CHECK(normalize_label(Task::hate3, "Offensive language") == 1);
    CHECK(normalize_label(Task::hate3, "offensive") == 1);
    CHECK(normalize_label(Task::hate3, "HATE SPEECH") == 2);
    CHECK(normalize_label(Task::hate3, "hatespeech") == 2);
    CHECK(normalize_label(Task::hate3, "Normal") == 0);
    CHECK(!normalize_label(Task::hate3, "whatever").has_value());
    CHECK(normalize_label(Task::sst3, "no sentiment") == 2);
    CHECK(normalize_label(Task::sst3, "neutral") == 2);
    CHECK(normalize_label(Task::sst3, "Positive") == 0);
}

TEST_CASE("duplicate ids are rejected") {
    TempDir dir;
    std::string two =
        R"({"id":"dup","tokens":["a"],"annotators":[{"label":"normal"}]})" "\n"
        R"({"id":"dup","tokens":["b"],"annotators":[{"label":"normal"}]})" "\n";
    auto path = dir.file("dup.jsonl", two);
    CHECK_THROWS_AS(load_corpus(path, CorpusFormat::hatexplain_json), ValidationError);
}
