#include <benchmark/benchmark.h>

#include "ppaudit/agreement.hpp"
#include "ppaudit/metrics.hpp"
#include "ppaudit/parsing.hpp"
#include "ppaudit/prompting.hpp"
#include "ppaudit/provider.hpp"
#include "ppaudit/stats.hpp"

#include <random>

using namespace ppaudit;

namespace {

Mask random_mask(std::mt19937_64 & rng, size_t n) {
    Mask m(n);
    for (auto & b : m) b = rng() % 2;
    return m;
}

Instance bench_instance(size_t tokens) {
    Instance inst;
    inst.id = "bench";
    inst.task = Task::hate3;
    for (size_t i = 0; i < tokens; ++i) {
        inst.tokens.push_back({static_cast<int>(i), "word" + std::to_string(i)});
    }
    GoldAnnotation g;
    g.label = 1;
    g.rationale_mask.assign(tokens, 0);
    for (size_t i = 0; i < tokens / 3; ++i) g.rationale_mask[i] = 1;
    inst.gold["majority"] = g;
    return inst;
}

}  // namespace

static void BM_token_f1(benchmark::State & state) {
    std::mt19937_64 rng(1);
    size_t n = static_cast<size_t>(state.range(0));
    Mask a = random_mask(rng, n);
    Mask b = random_mask(rng, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(token_f1(a, b));
    }
}
BENCHMARK(BM_token_f1)->Arg(32)->Arg(512);

static void BM_krippendorff_alpha(benchmark::State & state) {
    std::mt19937_64 rng(2);
    size_t units = static_cast<size_t>(state.range(0));
    ReliabilityData data;
    data.level = AlphaLevel::ordinal;
    data.scale = {0, 2};
    for (size_t u = 0; u < units; ++u) {
        std::vector<std::optional<int>> row;
        for (int a = 0; a < 21; ++a) {
            if (rng() % 10 == 0) row.push_back(std::nullopt);
            else row.push_back(static_cast<int>(rng() % 3));
        }
        data.values.push_back(std::move(row));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(krippendorff_alpha(data));
    }
}
BENCHMARK(BM_krippendorff_alpha)->Arg(100)->Arg(500);

static void BM_bootstrap_delta(benchmark::State & state) {
    std::mt19937_64 rng(3);
    size_t n = static_cast<size_t>(state.range(0));
    std::vector<double> persona(n), baseline(n);
    for (size_t i = 0; i < n; ++i) {
        persona[i] = static_cast<double>(rng() % 200);
        baseline[i] = static_cast<double>(rng() % 200);
    }
    BootstrapConfig cfg;
    cfg.iterations = 1000;
    cfg.seed = 9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_delta(persona, baseline, cfg));
    }
}
BENCHMARK(BM_bootstrap_delta)->Arg(500);

static void BM_parse_completion(benchmark::State & state) {
    std::string text =
        "<think>weighing each token carefully before settling on a label for this post, "
        "which reads as mocking but not hateful</think>\n"
        "{\"label\": \"Offensive language\", \"rationale\": [\"word3\", \"word7\", \"word11\"]}";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_completion(text, Task::hate3));
    }
}
BENCHMARK(BM_parse_completion);

static void BM_render_prompt(benchmark::State & state) {
    Instance inst = bench_instance(40);
    PromptSpec spec;
    spec.task = Task::hate3;
    spec.persona = *find_persona("religion_atheist");
    for (auto _ : state) {
        benchmark::DoNotOptimize(render(spec, inst));
    }
}
BENCHMARK(BM_render_prompt);

static void BM_simulate(benchmark::State & state) {
    Instance inst = bench_instance(40);
    Persona persona = *find_persona("age_35");
    SimulatedAnnotatorParams params;
    params.seed = 4;
    params.rationale_fidelity = 0.9;
    params.false_mark_rate = 0.05;
    int run = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(params, inst, persona, ++run));
    }
}
BENCHMARK(BM_simulate);

static void BM_project_mask(benchmark::State & state) {
    Instance inst = bench_instance(120);
    std::vector<std::string> words = {"word3", "word7 word11", "word50", "missing"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_mask(words, inst.tokens));
    }
}
BENCHMARK(BM_project_mask);

BENCHMARK_MAIN();
