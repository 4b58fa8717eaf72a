// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero when any criterion
// fails.
//
// Known red: criterion 2 includes an annotator-duplication invariance clause
// that is not a property of small-sample-corrected Krippendorff alpha.
// Duplicating every annotator's column adds perfect-agreement clone pairs
// whose effect does not cancel against the 1/(m_u-1) pair weights and the
// n(n-1) expected-disagreement correction; a three-unit counterexample moves
// alpha from 4/9 to 16/27. The uncorrected formulation that would make the
// clause exact contradicts the swapped-pair example (alpha must be negative,
// which requires the corrections). The clause is asserted literally below and
// reported as a failure rather than weakened.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "oracles.hpp"
#include "ppaudit/report.hpp"
#include "ppaudit/util.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <thread>
#include <unistd.h>

using namespace ppaudit;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string note;
    double seconds = 0.0;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Check {
    bool ok = true;
    std::string first_failure;
    void expect(bool cond, const std::string & what) {
        if (!cond && ok) {
            ok = false;
            first_failure = what;
        }
    }
};

// ------------------------------------------------------------ criterion 1

CriterionResult criterion1_metric_oracles() {
    CriterionResult r;
    r.name = "1 metric oracle suite (200 randomized instances, 1e-12)";
    double start = now_seconds();
    Check c;
    std::mt19937_64 rng(20260809);
    std::vector<MaskPair> batch;
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 1 + rng() % 12;
        int classes = 2 + static_cast<int>(rng() % 2);
        std::vector<int> pred(n), gold(n);
        Mask mp(n), mg(n);
        for (size_t i = 0; i < n; ++i) {
            pred[i] = static_cast<int>(rng() % static_cast<uint64_t>(classes));
            gold[i] = static_cast<int>(rng() % static_cast<uint64_t>(classes));
            mp[i] = rng() % 2;
            mg[i] = rng() % 2;
        }
        c.expect(std::abs(token_f1(mp, mg) - oracle::token_f1(mp, mg)) < 1e-12, "token_f1");
        c.expect(std::abs(iou(mp, mg) - oracle::iou(mp, mg)) < 1e-12, "iou");
        c.expect(std::abs(macro_f1(pred, gold, classes) -
                          oracle::macro_f1(pred, gold, classes)) < 1e-12,
                 "macro_f1");
        c.expect(std::abs(mae_percent(pred, gold) - oracle::mae_percent(pred, gold)) < 1e-12,
                 "mae");
        c.expect(std::abs(mean_error_percent(pred, gold) - oracle::me_percent(pred, gold)) <
                     1e-12,
                 "mean_error");
        auto lhs = overflag_matrix(pred, gold, classes);
        auto rhs = oracle::overflag(pred, gold, classes);
        c.expect(lhs.size() == rhs.size(), "overflag shape");
        for (const auto & [cell, rate] : rhs) {
            c.expect(lhs.count(cell) == 1 && std::abs(lhs.at(cell) - rate) < 1e-12,
                     "overflag rate");
        }
        batch.push_back({mp, mg});
    }
    double got = iou_f1(batch, 0.5);
    size_t hits = 0;
    for (const auto & pr : batch) {
        if (oracle::iou(pr.pred, pr.gold) >= 0.5) ++hits;
    }
    c.expect(std::abs(got - static_cast<double>(hits) / batch.size()) < 1e-12, "iou_f1 batch");
    r.seconds = now_seconds() - start;
    c.expect(r.seconds < 5.0, "runtime under 5s");
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

// ------------------------------------------------------------ criterion 2

std::vector<std::vector<int>> random_reliability(std::mt19937_64 & rng) {
    size_t units = 2 + rng() % 9;          // <= 10
    size_t annotators = 2 + rng() % 5;     // <= 6
    int cats = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<int>> values(units, std::vector<int>(annotators, -1));
    for (auto & row : values) {
        for (auto & v : row) {
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            if (u >= 0.3) v = static_cast<int>(rng() % static_cast<uint64_t>(cats));
        }
    }
    return values;
}

ReliabilityData to_data(const std::vector<std::vector<int>> & values, AlphaLevel level) {
    ReliabilityData d;
    d.level = level;
    for (const auto & row : values) {
        std::vector<std::optional<int>> r;
        for (int v : row) r.push_back(v < 0 ? std::optional<int>() : std::optional<int>(v));
        d.values.push_back(std::move(r));
    }
    return d;
}

CriterionResult criterion2_krippendorff() {
    CriterionResult r;
    r.name = "2 Krippendorff alpha (oracle 1e-10, permutation + duplication exact)";
    double start = now_seconds();
    Check c;
    std::mt19937_64 rng(424242);
    double max_dup_dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto values = random_reliability(rng);
        for (AlphaLevel level : {AlphaLevel::nominal, AlphaLevel::ordinal}) {
            auto got = krippendorff_alpha(to_data(values, level));
            auto expect = oracle::krippendorff_alpha(values, level == AlphaLevel::ordinal);
            c.expect(got.has_value() == expect.has_value(), "oracle definedness");
            if (got && expect) c.expect(std::abs(*got - *expect) < 1e-10, "oracle value 1e-10");
        }
        // annotator permutation: rotate columns
        auto base = krippendorff_alpha(to_data(values, AlphaLevel::nominal));
        auto rotated = values;
        for (auto & row : rotated) std::rotate(row.begin(), row.begin() + 1, row.end());
        auto perm = krippendorff_alpha(to_data(rotated, AlphaLevel::nominal));
        c.expect(base.has_value() == perm.has_value(), "permutation definedness");
        if (base && perm) c.expect(std::abs(*base - *perm) == 0.0, "permutation exact");
        // annotator duplication (spec clause asserted literally; see header note)
        auto doubled = values;
        for (size_t u = 0; u < values.size(); ++u) {
            for (int v : values[u]) doubled[u].push_back(v);
        }
        auto dup = krippendorff_alpha(to_data(doubled, AlphaLevel::nominal));
        if (base && dup) max_dup_dev = std::max(max_dup_dev, std::abs(*base - *dup));
    }
    bool duplication_exact = max_dup_dev <= 1e-12;
    r.seconds = now_seconds() - start;
    c.expect(r.seconds < 10.0, "runtime under 10s");
    r.passed = c.ok && duplication_exact;
    if (!duplication_exact && c.ok) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "duplication clause: max |alpha shift| = %.4f (not a property of "
                      "corrected alpha; oracle + permutation clauses pass)",
                      max_dup_dev);
        r.note = buf;
    } else {
        r.note = c.first_failure;
    }
    return r;
}

// ------------------------------------------------------------ criterion 3

CriterionResult criterion3_stuart_maxwell() {
    CriterionResult r;
    r.name = "3 Stuart-Maxwell (oracle 1e-9, McNemar identity, chi-square 1e-6)";
    double start = now_seconds();
    Check c;
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> table(3, std::vector<double>(3, 0.0));
        for (auto & row : table) {
            for (auto & v : row) v = static_cast<double>(1 + rng() % 30);
        }
        auto got = stuart_maxwell_from_table(table);
        auto expect = oracle::stuart_maxwell_statistic(table);
        c.expect(expect.has_value(), "oracle solvable");
        if (expect) c.expect(std::abs(got.statistic - *expect) < 1e-9, "statistic 1e-9");
        c.expect(got.dof == 2, "dof = k-1");
        c.expect(got.p >= 0.0 && got.p <= 1.0, "p in [0,1]");
    }
    for (int trial = 0; trial < 50; ++trial) {
        double a = static_cast<double>(rng() % 30);
        double b = static_cast<double>(1 + rng() % 30);
        double cc = static_cast<double>(rng() % 30);
        double d = static_cast<double>(rng() % 30);
        auto got = stuart_maxwell_from_table({{a, b}, {cc, d}});
        double mcnemar = (b - cc) * (b - cc) / (b + cc);
        c.expect(std::abs(got.statistic - mcnemar) < 1e-9, "mcnemar identity");
    }
    auto sym = stuart_maxwell_from_table({{4, 2, 7}, {2, 9, 1}, {7, 1, 3}});
    c.expect(sym.statistic == 0.0 && sym.p == 1.0, "symmetric table");
    c.expect(std::abs(chi_square_sf(3.841, 1) - oracle::chi_square_sf(3.841, 1)) < 1e-6,
             "chi2 sf at (1, 3.841)");
    c.expect(std::abs(chi_square_sf(5.991, 2) - oracle::chi_square_sf(5.991, 2)) < 1e-6,
             "chi2 sf at (2, 5.991)");
    r.seconds = now_seconds() - start;
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

// ------------------------------------------------------------ criterion 4

CriterionResult criterion4_bootstrap(const char * self_path) {
    CriterionResult r;
    r.name = "4 bootstrap (degenerate CIs, cross-process determinism)";
    double start = now_seconds();
    Check c;
    BootstrapConfig cfg;
    cfg.seed = 2024;
    std::vector<double> base = {4.0, 8.0, 15.0, 16.0, 23.0, 42.0};
    auto same = bootstrap_delta(base, base, cfg);
    c.expect(same.ci_low == 0.0 && same.ci_high == 0.0 && !same.significant,
             "identical scores -> CI [0,0]");
    std::vector<double> shifted = base;
    for (auto & v : shifted) v += 1.0;
    auto up = bootstrap_delta(shifted, base, cfg);
    c.expect(up.ci_low == 1.0 && up.ci_high == 1.0 && up.significant,
             "constant +1 shift -> CI [1,1]");

    // two separate processes must print identical endpoints
    std::string cmd = std::string(self_path) + " --bootstrap-child 2>/dev/null";
    auto run_child = [&]() -> std::string {
        FILE * pipe = popen(cmd.c_str(), "r");
        if (!pipe) return "<popen failed>";
        char buf[256];
        std::string out;
        while (fgets(buf, sizeof(buf), pipe)) out += buf;
        pclose(pipe);
        return out;
    };
    std::string first = run_child();
    std::string second = run_child();
    c.expect(!first.empty() && first == second, "cross-process CI endpoints identical");
    r.seconds = now_seconds() - start;
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

void bootstrap_child() {
    BootstrapConfig cfg;
    cfg.seed = 99991;
    cfg.iterations = 1000;
    std::vector<double> persona = {1.0, 5.0, 2.0, 8.0, 3.0, 9.0, 4.0, 7.0, 6.0, 0.0};
    std::vector<double> baseline = {2.0, 3.0, 5.0, 7.0, 1.0, 8.0, 2.0, 9.0, 4.0, 1.0};
    auto d = bootstrap_delta(persona, baseline, cfg);
    std::printf("%.17g %.17g %.17g\n", d.ci_low, d.delta_mean, d.ci_high);
}

// ------------------------------------------------------------ criterion 5

std::string synthetic_corpus(const fs::path & dir, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
        int label = i < n / 2 ? 0 : 1;  // first half Normal, second half Offensive
        std::string tokens;
        std::string mask;
        for (int t = 0; t < 6; ++t) {
            if (t) {
                tokens += ",";
                mask += ",";
            }
            tokens += "\"w" + std::to_string(i) + "q" + std::to_string(t) + "\"";
            mask += (label != 0 && t < 3) ? "1" : "0";
        }
        std::string label_name = label == 0 ? "normal" : "offensive";
        std::string targets = i % 3 == 0 ? "\"Women\"" : i % 3 == 1 ? "\"African\"" : "";
        out += "{\"id\":\"s" + std::to_string(i) + "\",\"tokens\":[" + tokens +
               "],\"annotators\":[";
        for (int a = 0; a < 3; ++a) {
            if (a) out += ",";
            out += "{\"label\":\"" + label_name + "\",\"rationale\":[" + mask + "]}";
        }
        out += "],\"targets\":[" + targets + "]}\n";
    }
    auto path = (dir / "acceptance_corpus.jsonl").string();
    write_text_file(path, out);
    return path;
}

AuditConfig base_config(const std::string & corpus_path) {
    AuditConfig cfg;
    cfg.corpus_path = corpus_path;
    cfg.corpus_format = CorpusFormat::hatexplain_json;
    cfg.personas = {"gender_male", "gender_female", "political_left_wing",
                    "political_right_wing", "political_centrist"};
    cfg.provider.kind = ProviderKind::simulated;
    cfg.runs = 3;
    cfg.metrics.bootstrap.iterations = 1000;
    return cfg;
}

CriterionResult criterion5_end_to_end() {
    CriterionResult r;
    r.name = "5 end-to-end simulated audit (ideal values, bias detection over 20 seeds)";
    double start = now_seconds();
    Check c;
    fs::path dir = fs::temp_directory_path() / ("ppaudit_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto corpus = synthetic_corpus(dir, 50);

    // degenerate configuration: everything ideal
    auto cfg = base_config(corpus);
    cfg.seed = 7;
    cfg.simulated.seed = 7;
    cfg.metrics.bootstrap.seed = 7;
    auto bundle = run_audit(cfg);
    c.expect(bundle.manifest.work_item_count == 50u * 6u * 3u, "work item count");
    for (const auto & s : bundle.scores) {
        if (s.table.metric == "mae") c.expect(s.table.mean == 0.0, "MAE = 0.0");
        if (s.table.metric == "token_f1") c.expect(s.table.mean == 100.0, "Token-F1 = 100.0");
    }
    for (const auto & a : bundle.agreement) {
        c.expect(a.alpha.mean.has_value() && std::abs(*a.alpha.mean - 1.0) < 1e-12,
                 "all group alpha = 1.0");
    }
    for (const auto & o : bundle.overflag) c.expect(o.rate == 0.0, "over-flag rates = 0");
    for (const auto & d : bundle.deltas) {
        c.expect(d.delta.ci_low == 0.0 && d.delta.ci_high == 0.0, "deltas CI = [0,0]");
    }

    // +1 drift with probability 0.3 on one persona; closed-form expected MAE
    // shift on an all-shiftable (Normal/Offensive) corpus = 30 points
    int detected = 0;
    double delta_sum = 0.0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        auto biased = base_config(corpus);
        biased.seed = seed;
        biased.simulated.seed = seed;
        biased.metrics.bootstrap.seed = seed;
        biased.simulated.bias["political_left_wing"] = {+1, 0.3};
        auto b = run_audit(biased);
        double base_me = -1e9;
        double persona_me = -1e9;
        for (const auto & s : b.scores) {
            if (s.table.metric != "me") continue;
            if (s.persona_id == "baseline") base_me = s.table.mean;
            if (s.persona_id == "political_left_wing") persona_me = s.table.mean;
        }
        bool significant = false;
        for (const auto & d : b.deltas) {
            if (d.delta.persona_id == "political_left_wing" && d.delta.metric == "mae") {
                significant = d.delta.significant;
                delta_sum += d.delta.delta_mean;
            }
        }
        if (persona_me > base_me && significant) ++detected;
    }
    c.expect(detected >= 18, "bias significant in >= 18/20 seeds");
    double mean_delta = delta_sum / 20.0;
    c.expect(std::abs(mean_delta - 30.0) < 5.0, "mean MAE shift near the 30-point closed form");

    fs::remove_all(dir);
    r.seconds = now_seconds() - start;
    c.expect(r.seconds < 60.0, "runtime under 60s");
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

// ------------------------------------------------------------ criterion 6

struct ParserFixture {
    const char * text;
    Task task;
    ParseStatus status;
    int label;  // -1 when failed
    std::vector<std::string> rationale;
};

CriterionResult criterion6_parser_corpus() {
    CriterionResult r;
    r.name = "6 parser fixture corpus (>=30 cases) + 10k random-bytes fuzz";
    double start = now_seconds();
    Check c;
    using PS = ParseStatus;
    const std::vector<ParserFixture> fixtures = {
        // clean outputs across the three schemas
        {"<think>x</think>{\"label\":\"Normal\",\"rationale\":[]}", Task::hate3, PS::ok, 0, {}},
        {"<think>reasoning here</think>{\"label\":\"Offensive language\",\"rationale\":[\"slur\"]}",
         Task::hate3, PS::ok, 1, {"slur"}},
        {"<think>t</think>{\"label\":\"Hate speech\",\"rationale\":[\"bad\",\"words\"]}",
         Task::hate3, PS::ok, 2, {"bad", "words"}},
        {"{\"label\":\"Positive\",\"rationale\":[\"lovely\"]}", Task::sst3, PS::ok, 0, {"lovely"}},
        {"{\"label\":\"Negative\",\"rationale\":[\"awful\"]}", Task::sst3, PS::ok, 1, {"awful"}},
        {"{\"label\":\"No sentiment\",\"rationale\":[]}", Task::sst3, PS::ok, 2, {}},
        // schema variant carrying the explicit reasoning field
        {"{\"label\":\"Normal\",\"rationale\":[],\"reasoning\":\"it reads fine\"}", Task::hate3,
         PS::ok, 0, {}},
        {"{\"label\":\"Offensive language\",\"rationale\":[\"rude\"],\"reasoning\":\"mocking tone\"}",
         Task::hate3, PS::ok, 1, {"rude"}},
        // alias normalization
        {"{\"label\":\"offensive\",\"rationale\":[]}", Task::hate3, PS::ok, 1, {}},
        {"{\"label\":\"hate\",\"rationale\":[]}", Task::hate3, PS::ok, 2, {}},
        {"{\"label\":\"HATESPEECH\",\"rationale\":[]}", Task::hate3, PS::ok, 2, {}},
        {"{\"label\":\"neutral\",\"rationale\":[]}", Task::sst3, PS::ok, 2, {}},
        {"{\"label\":\"no_sentiment\",\"rationale\":[]}", Task::sst3, PS::ok, 2, {}},
        // repairs: fences, trailing commas, single quotes
        {"```json\n{\"label\":\"Normal\",\"rationale\":[\"ok\",]}\n```", Task::hate3,
         PS::repaired, 0, {"ok"}},
        {"{\"label\":\"Normal\",\"rationale\":[\"a\",\"b\",],}", Task::hate3, PS::repaired, 0,
         {"a", "b"}},
        {"{'label': 'Normal', 'rationale': ['x']}", Task::hate3, PS::repaired, 0, {"x"}},
        {"Sure! Here's my answer:\n```\n{'label': 'Hate speech', 'rationale': ['threat',]}\n```",
         Task::hate3, PS::repaired, 2, {"threat"}},
        // think-tag variants
        {"<think>first</think>draft{\"label\":\"Normal\",\"rationale\":[]}<think>second</think>"
         "{\"label\":\"Offensive language\",\"rationale\":[\"final\"]}",
         Task::hate3, PS::ok, 1, {"final"}},
        {"<think>never closed {\"label\":\"Normal\",\"rationale\":[]}", Task::hate3, PS::repaired,
         0, {}},
        {"<think>{\"label\":\"Hate speech\"} inside only</think>", Task::hate3, PS::failed, -1, {}},
        // prose around the payload
        {"As requested, the JSON: {\"label\":\"Normal\",\"rationale\":[]} hope that helps!",
         Task::hate3, PS::ok, 0, {}},
        {"{\"note\":\"not the answer\"} {\"label\":\"Negative\",\"rationale\":[\"bleak\"]}",
         Task::sst3, PS::ok, 1, {"bleak"}},
        // braces inside strings must not confuse the scanner
        {"{\"label\":\"Normal\",\"rationale\":[\"{weird}\"]}", Task::hate3, PS::ok, 0, {"{weird}"}},
        // refusals and garbage
        {"I cannot help with that.", Task::hate3, PS::failed, -1, {}},
        {"", Task::hate3, PS::failed, -1, {}},
        {"{}", Task::hate3, PS::failed, -1, {}},
        {"{\"label\":\"banana\",\"rationale\":[]}", Task::hate3, PS::failed, -1, {}},
        {"{\"label\":42,\"rationale\":[]}", Task::hate3, PS::failed, -1, {}},
        {"[1, 2, 3]", Task::hate3, PS::failed, -1, {}},
        // cose resolution
        {"{\"answer\":\"dog\",\"answer_index\":1,\"rationale\":[\"pet\"]}", Task::cose, PS::ok, 1,
         {"pet"}},
        {"{\"answer\":\"dog\",\"answer_index\":0,\"rationale\":[]}", Task::cose, PS::repaired, 1,
         {}},
        {"{\"answer\":\"whale\",\"answer_index\":2,\"rationale\":[]}", Task::cose, PS::repaired, 2,
         {}},
        {"{\"answer\":\"whale\",\"answer_index\":9,\"rationale\":[]}", Task::cose, PS::failed, -1,
         {}},
        {"<think>hmm</think>{\"answer\":\"cat\",\"answer_index\":\"0\",\"rationale\":[\"whiskers\"]}",
         Task::cose, PS::ok, 0, {"whiskers"}},
        // unicode survives extraction
        {"{\"label\":\"Normal\",\"rationale\":[\"café\"]}", Task::hate3, PS::ok, 0,
         {"café"}},
    };
    c.expect(fixtures.size() >= 30, "at least 30 fixtures");
    const std::vector<std::string> cose_options = {"cat", "dog", "fish"};
    size_t idx = 0;
    for (const auto & f : fixtures) {
        auto p = parse_completion(f.text, f.task, f.task == Task::cose ? cose_options
                                                                       : std::vector<std::string>{});
        std::string tag = "fixture " + std::to_string(idx++);
        c.expect(p.status == f.status, tag + " status");
        if (f.status != PS::failed) {
            c.expect(p.label.has_value() && *p.label == f.label, tag + " label");
            c.expect(p.rationale_words == f.rationale, tag + " rationale");
        } else {
            c.expect(!p.label.has_value(), tag + " failed has no label");
        }
    }

    // fuzz: 10,000 random byte strings may never escape an exception
    std::mt19937_64 rng(616);
    size_t crashes = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        size_t len = rng() % 300;
        std::string junk(len, '\0');
        for (auto & ch : junk) ch = static_cast<char>(rng() & 0xff);
        try {
            auto p = parse_completion(junk, Task::hate3);
            (void)p;
            auto q = parse_completion(junk, Task::cose, cose_options);
            (void)q;
        } catch (...) {
            ++crashes;
        }
    }
    c.expect(crashes == 0, "zero fuzz escapes");
    r.seconds = now_seconds() - start;
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

// ------------------------------------------------------------ criterion 7

CriterionResult criterion7_plan_cardinalities() {
    CriterionResult r;
    r.name = "7 plan cardinalities (31,500 / 9,468) and Bonferroni column";
    double start = now_seconds();
    Check c;
    auto light_instances = [](int n) {
        std::vector<Instance> out;
        for (int i = 0; i < n; ++i) {
            Instance inst;
            inst.id = "p" + std::to_string(i);
            inst.task = Task::hate3;
            inst.tokens = {{0, "x"}};
            out.push_back(std::move(inst));
        }
        return out;
    };
    std::vector<Persona> singles;
    std::vector<Persona> composites;
    for (const auto & p : registry()) {
        if (p.kind == PersonaKind::single) singles.push_back(p);
        if (p.kind == PersonaKind::composite) composites.push_back(p);
    }
    c.expect(singles.size() == 21, "21 single personas");
    c.expect(composites.size() == 12, "12 composite personas");
    c.expect(plan_run(light_instances(500), singles, 3).size() == 31500u, "500x21x3 = 31,500");
    c.expect(plan_run(light_instances(263), composites, 3).size() == 9468u, "263x12x3 = 9,468");
    c.expect(plan_run(light_instances(1), {singles[0]}, 1).size() == 1u, "1x1x1 = 1");

    c.expect(std::abs(bonferroni_threshold(1) - 0.05) < 1e-12, "family 1 -> 0.05");
    c.expect(std::abs(bonferroni_threshold(3) - 0.0167) < 5e-5, "family 3 -> 0.0167");
    c.expect(std::abs(bonferroni_threshold(10) - 0.005) < 1e-12, "family 10 -> 0.005");
    r.seconds = now_seconds() - start;
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

// ------------------------------------------------------------ criterion 8

// Mock chat endpoint: labels cycle with the prompt digest and rationales
// quote words from the submitted input so masks align with real tokens.
void mock_chat_handler(const httplib::Request & req, httplib::Response & res) {
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    std::string prompt;
    if (body.is_object() && body.contains("messages") && !body["messages"].empty()) {
        prompt = body["messages"][0].value("content", "");
    }
    std::string input;
    auto pos = prompt.rfind("Input:\n");
    if (pos != std::string::npos) input = prompt.substr(pos + 7);
    std::vector<std::string> words;
    std::string word;
    for (char ch : input) {
        if (ch == ' ' || ch == '\n') {
            if (!word.empty()) words.push_back(word);
            word.clear();
        } else {
            word += ch;
        }
    }
    if (!word.empty()) words.push_back(word);

    uint64_t h = fnv1a64(prompt);
    int label = static_cast<int>(h % 3);
    static const char * names[] = {"Normal", "Offensive language", "Hate speech"};
    nlohmann::json payload;
    payload["label"] = names[label];
    nlohmann::json rationale = nlohmann::json::array();
    if (label != 0) {
        for (size_t i = 0; i < words.size() && i < 2; ++i) rationale.push_back(words[i]);
    }
    payload["rationale"] = std::move(rationale);
    std::string text = "<think>Looking at the post, the wording settles it for me. I weigh "
                       "each word and land on " +
                       std::string(names[label]) + ".</think>\n" + payload.dump();
    nlohmann::json reply;
    reply["choices"] = nlohmann::json::array(
        {nlohmann::json{{"message", {{"role", "assistant"}, {"content", text}}}}});
    res.set_content(reply.dump(), "application/json");
}

CriterionResult criterion8_http_reproduction() {
    CriterionResult r;
    r.name = "8 http provider reproduction path (mock endpoint, full bundle)";
    double start = now_seconds();
    Check c;

    httplib::Server server;
    server.Post("/v1/chat/completions", mock_chat_handler);
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    fs::path dir = fs::temp_directory_path() / ("ppaudit_http_acc_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto corpus = synthetic_corpus(dir, 12);

    ::setenv("PPAUDIT_ACCEPTANCE_KEY", "test-key", 1);
    AuditConfig cfg;
    cfg.corpus_path = corpus;
    cfg.corpus_format = CorpusFormat::hatexplain_json;
    cfg.personas = {"singles"};
    cfg.provider.kind = ProviderKind::http_chat;
    cfg.provider.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    cfg.provider.model_name = "mock-model";
    cfg.provider.api_key_env = "PPAUDIT_ACCEPTANCE_KEY";
    cfg.provider.max_parallel = 4;
    cfg.runs = 2;
    cfg.seed = 3;
    cfg.metrics.bootstrap.iterations = 300;
    cfg.metrics.bootstrap.seed = 3;
    cfg.cache_path = (dir / "responses.jsonl").string();

    try {
        auto bundle = run_audit(cfg);
        auto out = (dir / "out").string();
        emit(bundle, out);
        c.expect(fs::exists(fs::path(out) / "bundle.json"), "bundle emitted");
        // every table family populated
        c.expect(!bundle.scores.empty(), "scores populated");
        c.expect(!bundle.deltas.empty(), "deltas populated");
        c.expect(!bundle.agreement.empty(), "agreement populated");
        c.expect(!bundle.overflag.empty(), "overflag populated");
        c.expect(!bundle.stuart_maxwell.empty(), "stuart-maxwell populated");
        c.expect(!bundle.label_distributions.empty(), "label distributions populated");
        c.expect(!bundle.disagreement.empty(), "disagreement populated");
        c.expect(!bundle.linguistics.empty(), "linguistics populated");
        c.expect(!bundle.slices.empty(), "slices populated");
        c.expect(!bundle.parse_failures.empty(), "parse failure summary populated");
        // criteria 1-4 invariants on the live data
        std::map<std::string, std::map<std::string, double>> by_persona;
        for (const auto & s : bundle.scores) {
            double v = s.table.mean;
            if (s.table.metric == "token_f1" || s.table.metric == "iou_f1" ||
                s.table.metric == "macro_f1") {
                c.expect(v >= 0.0 && v <= 100.0, "scores within [0,100]");
            }
            by_persona[s.persona_id][s.table.metric] = v;
        }
        for (const auto & [persona, metrics] : by_persona) {
            if (metrics.count("mae") && metrics.count("me")) {
                c.expect(metrics.at("mae") >= std::abs(metrics.at("me")) - 1e-9,
                         "MAE >= |ME| per persona");
            }
        }
        for (const auto & a : bundle.agreement) {
            if (a.alpha.mean) {
                c.expect(*a.alpha.mean >= -1.0 - 1e-9 && *a.alpha.mean <= 1.0 + 1e-9,
                         "alpha within [-1,1]");
            }
        }
        for (const auto & s : bundle.stuart_maxwell) {
            c.expect(s.test.p >= 0.0 && s.test.p <= 1.0, "p within [0,1]");
            c.expect(s.test.statistic >= 0.0, "statistic >= 0");
        }
        for (const auto & d : bundle.deltas) {
            c.expect(d.delta.ci_low <= d.delta.ci_high, "CI ordered");
            c.expect(d.delta.significant == (d.delta.ci_low > 0.0 || d.delta.ci_high < 0.0),
                     "significance consistent with CI");
        }
        for (const auto & o : bundle.overflag) {
            c.expect(o.rate >= 0.0 && o.rate <= 1.0, "over-flag rate within [0,1]");
        }
        // resumability on the live cache
        auto second = run_audit(cfg);
        c.expect(second.manifest.cache_hit_count == second.manifest.work_item_count,
                 "second pass fully cache-served");
        c.expect(second.to_json() == bundle.to_json(), "cache-served bundle identical");
    } catch (const std::exception & e) {
        c.expect(false, std::string("exception: ") + e.what());
    }

    server.stop();
    server_thread.join();
    fs::remove_all(dir);
    r.seconds = now_seconds() - start;
    r.passed = c.ok;
    r.note = c.first_failure;
    return r;
}

}  // namespace

int main(int argc, char ** argv) {
    if (argc > 1 && std::string(argv[1]) == "--bootstrap-child") {
        bootstrap_child();
        return 0;
    }
    // resolve our own binary path for the cross-process bootstrap check
    char self_buf[4096];
    ssize_t len = ::readlink("/proc/self/exe", self_buf, sizeof(self_buf) - 1);
    std::string self = len > 0 ? std::string(self_buf, static_cast<size_t>(len))
                               : std::string(argv[0]);

    std::vector<CriterionResult> results;
    results.push_back(criterion1_metric_oracles());
    results.push_back(criterion2_krippendorff());
    results.push_back(criterion3_stuart_maxwell());
    results.push_back(criterion4_bootstrap(self.c_str()));
    results.push_back(criterion5_end_to_end());
    results.push_back(criterion6_parser_corpus());
    results.push_back(criterion7_plan_cardinalities());
    results.push_back(criterion8_http_reproduction());

    int failed = 0;
    for (const auto & r : results) {
        if (!r.passed) ++failed;
        std::printf("criterion %-70s %s (%.2fs)%s%s\n", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.seconds, r.note.empty() ? "" : " -- ",
                    r.note.c_str());
    }
    if (failed) {
        std::printf("%d criterion(s) failed\n", failed);
    } else {
        std::printf("all criteria passed\n");
    }
    return failed == 0 ? 0 : 1;
}
