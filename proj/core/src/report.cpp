#include "ppaudit/report.hpp"

#include "ppaudit/util.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

using nlohmann::json;
namespace fs = std::filesystem;

namespace ppaudit {

namespace {

json parse_object(const std::string & text, const std::string & origin) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError(origin + ": not a JSON object");
    }
    return j;
}

}  // namespace

AuditConfig config_from_json_text(const std::string & text, const std::string & origin) {
    json j = parse_object(text, origin);
    AuditConfig cfg;

    if (!j.contains("corpus") || !j["corpus"].is_object()) {
        throw ConfigError(origin + ": missing 'corpus' object");
    }
    const json & corpus = j["corpus"];
    cfg.corpus_path = corpus.value("path", "");
    if (cfg.corpus_path.empty()) throw ConfigError(origin + ": corpus.path is required");
    auto format = corpus_format_from_name(corpus.value("format", ""));
    if (!format) throw ConfigError(origin + ": corpus.format must be hatexplain_json or brwrr_json");
    cfg.corpus_format = *format;

    if (j.contains("personas")) {
        if (!j["personas"].is_array()) throw ConfigError(origin + ": personas must be an array");
        cfg.personas.clear();
        for (const auto & p : j["personas"]) cfg.personas.push_back(p.get<std::string>());
    }

    cfg.runs = j.value("runs", 3);
    if (cfg.runs < 1) throw ConfigError(origin + ": runs must be >= 1");
    cfg.seed = j.value("seed", static_cast<uint64_t>(42));
    if (j.contains("variant")) {
        auto v = prompt_variant_from_name(j["variant"].get<std::string>());
        if (!v) throw ConfigError(origin + ": variant must be cot or no-cot");
        cfg.variant = *v;
    }
    cfg.reasoning_field = j.value("reasoning_field", false);
    cfg.filter_inconclusive = j.value("filter_hatexplain", true);

    if (j.contains("sample") && !j["sample"].is_null()) {
        SampleConfig s;
        s.n = j["sample"].value("n", 0);
        s.seed = j["sample"].value("seed", cfg.seed);
        if (s.n == 0) throw ConfigError(origin + ": sample.n must be > 0");
        cfg.sample = s;
    }

    if (j.contains("provider")) {
        const json & p = j["provider"];
        auto kind = provider_kind_from_name(p.value("kind", "simulated"));
        if (!kind) throw ConfigError(origin + ": provider.kind must be http_chat or simulated");
        cfg.provider.kind = *kind;
        cfg.provider.endpoint_url = p.value("endpoint_url", "");
        cfg.provider.model_name = p.value("model_name", cfg.provider.kind == ProviderKind::simulated
                                                            ? "simulated-annotator"
                                                            : "");
        cfg.provider.api_key_env = p.value("api_key_env", "");
        cfg.provider.max_parallel = p.value("max_parallel", 4);
        if (p.contains("retry")) {
            cfg.provider.retry.max_attempts = p["retry"].value("max_attempts", 4);
            if (p["retry"].contains("backoff_ms")) {
                cfg.provider.retry.backoff_ms.clear();
                for (const auto & b : p["retry"]["backoff_ms"]) {
                    cfg.provider.retry.backoff_ms.push_back(b.get<int>());
                }
            }
        }
        if (p.contains("params") && !p["params"].is_null()) {
            if (!p["params"].is_object()) throw ConfigError(origin + ": provider.params must be an object");
            cfg.provider.params_json = p["params"].dump();
        }
        if (p.contains("reasoning_effort") && p["reasoning_effort"].is_string()) {
            cfg.provider.reasoning_effort = p["reasoning_effort"].get<std::string>();
        }
    }

    cfg.simulated.seed = cfg.seed;
    if (j.contains("simulated")) {
        const json & s = j["simulated"];
        cfg.simulated.seed = s.value("seed", cfg.seed);
        cfg.simulated.rationale_fidelity = s.value("rationale_fidelity", 1.0);
        cfg.simulated.false_mark_rate = s.value("false_mark_rate", 0.0);
        if (s.contains("bias")) {
            for (const auto & [pid, b] : s["bias"].items()) {
                PersonaBias bias;
                bias.drift = b.value("drift", 0);
                bias.probability = b.value("probability", 0.0);
                if (bias.probability < 0.0 || bias.probability > 1.0) {
                    throw ConfigError(origin + ": bias probability must be in [0,1]");
                }
                cfg.simulated.bias[pid] = bias;
            }
        }
        for (double p : {cfg.simulated.rationale_fidelity, cfg.simulated.false_mark_rate}) {
            if (p < 0.0 || p > 1.0) throw ConfigError(origin + ": simulated probabilities must be in [0,1]");
        }
    }

    cfg.metrics.bootstrap.seed = cfg.seed;
    if (j.contains("metrics")) {
        const json & m = j["metrics"];
        cfg.metrics.iou_threshold = m.value("iou_threshold", 0.5);
        cfg.metrics.token_f1_both_empty_one = m.value("token_f1_both_empty_one", true);
        if (m.contains("bootstrap")) {
            cfg.metrics.bootstrap.iterations = m["bootstrap"].value("iterations", 1000);
            cfg.metrics.bootstrap.confidence = m["bootstrap"].value("confidence", 0.95);
            cfg.metrics.bootstrap.seed = m["bootstrap"].value("seed", cfg.seed);
        }
    }

    cfg.cache_path = j.value("cache_path", "");
    cfg.records_path = j.value("records_path", "");
    return cfg;
}

AuditConfig load_config(const std::string & path) {
    return config_from_json_text(read_text_file(path), path);
}

std::string config_to_json(const AuditConfig & cfg) {
    json j;
    j["corpus"] = {{"path", cfg.corpus_path},
                   {"format", cfg.corpus_format == CorpusFormat::hatexplain_json ? "hatexplain_json"
                                                                                 : "brwrr_json"}};
    j["personas"] = cfg.personas;
    j["runs"] = cfg.runs;
    j["seed"] = cfg.seed;
    j["variant"] = prompt_variant_name(cfg.variant);
    j["reasoning_field"] = cfg.reasoning_field;
    j["filter_hatexplain"] = cfg.filter_inconclusive;
    if (cfg.sample) {
        j["sample"] = {{"n", cfg.sample->n}, {"seed", cfg.sample->seed}};
    }
    json provider;
    provider["kind"] = provider_kind_name(cfg.provider.kind);
    provider["endpoint_url"] = cfg.provider.endpoint_url;
    provider["model_name"] = cfg.provider.model_name;
    provider["api_key_env"] = cfg.provider.api_key_env;
    provider["max_parallel"] = cfg.provider.max_parallel;
    provider["retry"] = {{"max_attempts", cfg.provider.retry.max_attempts},
                         {"backoff_ms", cfg.provider.retry.backoff_ms}};
    provider["params"] = json::parse(cfg.provider.params_json, nullptr, false);
    if (cfg.provider.reasoning_effort) provider["reasoning_effort"] = *cfg.provider.reasoning_effort;
    j["provider"] = std::move(provider);
    json simulated;
    simulated["seed"] = cfg.simulated.seed;
    simulated["rationale_fidelity"] = cfg.simulated.rationale_fidelity;
    simulated["false_mark_rate"] = cfg.simulated.false_mark_rate;
    json bias = json::object();
    for (const auto & [pid, b] : cfg.simulated.bias) {
        bias[pid] = {{"drift", b.drift}, {"probability", b.probability}};
    }
    simulated["bias"] = std::move(bias);
    j["simulated"] = std::move(simulated);
    j["metrics"] = {{"iou_threshold", cfg.metrics.iou_threshold},
                    {"token_f1_both_empty_one", cfg.metrics.token_f1_both_empty_one},
                    {"bootstrap",
                     {{"iterations", cfg.metrics.bootstrap.iterations},
                      {"confidence", cfg.metrics.bootstrap.confidence},
                      {"seed", cfg.metrics.bootstrap.seed}}}};
    return j.dump(2);
}

std::vector<Persona> resolve_personas(const std::vector<std::string> & selection) {
    std::vector<Persona> out;
    std::set<std::string> seen;
    auto add = [&](const Persona & p) {
        if (seen.insert(p.id).second) out.push_back(p);
    };
    const Persona * baseline = find_persona("baseline");
    add(*baseline);  // always present so deltas are computable
    for (const auto & sel : selection) {
        std::string s = to_lower(sel);
        if (s == "baseline") continue;
        if (s == "singles" || s == "all") {
            for (const auto & p : registry()) {
                if (p.kind == PersonaKind::single) add(p);
            }
        }
        if (s == "composites" || s == "all") {
            for (const auto & p : registry()) {
                if (p.kind == PersonaKind::composite) add(p);
            }
        }
        if (s == "singles" || s == "composites" || s == "all") continue;
        const Persona * p = find_persona(sel);
        if (!p) throw ConfigError("unknown persona id or selector: " + sel);
        add(*p);
    }
    return out;
}

std::string RunManifest::to_json() const {
    json j;
    j["config_digest"] = config_digest;
    j["corpus_digest"] = corpus_digest;
    j["registry_version"] = registry_version;
    j["template_hashes"] = template_hashes;
    j["provider_kind"] = provider_kind;
    j["model_name"] = model_name;
    j["params"] = json::parse(params_json, nullptr, false);
    if (reasoning_effort) j["reasoning_effort"] = *reasoning_effort;
    j["seed"] = seed;
    j["runs"] = runs;
    j["variant"] = variant;
    j["instances"] = instance_count;
    j["personas"] = persona_count;
    j["work_items"] = work_item_count;
    j["cache_hits"] = cache_hit_count;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j.dump(2);
}

namespace {

json score_table_json(const ScoreTable & t) {
    json j;
    j["metric"] = t.metric;
    j["per_run"] = t.per_run;
    j["mean"] = t.mean;
    j["std"] = t.stddev;
    j["unit"] = t.unit;
    return j;
}

json alpha_summary_json(const AlphaSummary & a) {
    json j;
    json per_run = json::array();
    for (const auto & v : a.per_run) {
        if (v) per_run.push_back(*v);
        else per_run.push_back(nullptr);
    }
    j["per_run"] = std::move(per_run);
    if (a.mean) j["mean"] = *a.mean;
    if (a.stddev) j["std"] = *a.stddev;
    j["defined_runs"] = a.defined_runs;
    return j;
}

}  // namespace

std::string ReportBundle::to_json() const {
    json j;
    j["task"] = task_name(task);
    j["model"] = model_name;
    // manifest identity fields only; timestamps and cache hits stay in
    // manifest.json so bundles from resumed runs compare byte-equal
    j["config_digest"] = manifest.config_digest;
    j["corpus_digest"] = manifest.corpus_digest;
    j["registry_version"] = manifest.registry_version;
    j["seed"] = manifest.seed;
    j["runs"] = manifest.runs;

    json scores = json::array();
    for (const auto & s : this->scores) {
        json row;
        row["persona"] = s.persona_id;
        row["gold_group"] = s.gold_group;
        row["score"] = score_table_json(s.table);
        row["excluded_records"] = s.excluded_records;
        scores.push_back(std::move(row));
    }
    j["scores"] = std::move(scores);

    json deltas = json::array();
    for (const auto & d : this->deltas) {
        deltas.push_back({{"persona", d.delta.persona_id},
                          {"gold_group", d.gold_group},
                          {"metric", d.delta.metric},
                          {"delta_mean", d.delta.delta_mean},
                          {"ci_low", d.delta.ci_low},
                          {"ci_high", d.delta.ci_high},
                          {"significant", d.delta.significant},
                          {"paired_instances", d.paired_instances}});
    }
    j["deltas"] = std::move(deltas);

    json agreement = json::array();
    for (const auto & a : this->agreement) {
        json row;
        row["kind"] = a.kind;
        row["group"] = a.group;
        row["alpha"] = alpha_summary_json(a.alpha);
        agreement.push_back(std::move(row));
    }
    j["agreement"] = std::move(agreement);

    json overflag = json::array();
    for (const auto & o : this->overflag) {
        overflag.push_back({{"persona", o.persona_id},
                            {"gold", o.gold_label},
                            {"pred", o.pred_label},
                            {"rate", o.rate}});
    }
    j["overflag"] = std::move(overflag);

    json sm = json::array();
    for (const auto & s : this->stuart_maxwell) {
        sm.push_back({{"group", s.group},
                      {"persona_a", s.persona_a},
                      {"persona_b", s.persona_b},
                      {"statistic", s.test.statistic},
                      {"dof", s.test.dof},
                      {"p", s.test.p},
                      {"collapsed_categories", s.test.collapsed_categories},
                      {"bonferroni_threshold", s.threshold},
                      {"significant", s.significant}});
    }
    j["stuart_maxwell"] = std::move(sm);

    json dist = json::array();
    for (const auto & d : label_distributions) {
        dist.push_back({{"persona", d.persona_id}, {"label", d.label}, {"fraction", d.fraction}});
    }
    j["label_distributions"] = std::move(dist);

    json disagreement = json::array();
    for (const auto & d : this->disagreement) {
        disagreement.push_back(
            {{"group", d.group}, {"per_run", d.rate.per_run}, {"mean", d.rate.mean}});
    }
    j["disagreement"] = std::move(disagreement);

    json linguistics = json::array();
    for (const auto & l : this->linguistics) {
        linguistics.push_back({{"persona", l.persona_id},
                               {"model", l.model_name},
                               {"avg_word_count", l.avg_word_count},
                               {"avg_flesch", l.avg_flesch},
                               {"records", l.record_count}});
    }
    j["linguistics"] = std::move(linguistics);

    json slices = json::array();
    for (const auto & s : this->slices) {
        json row;
        row["subgroup"] = s.subgroup;
        row["n"] = s.n;
        row["persona"] = s.persona_id;
        row["score"] = score_table_json(s.table);
        slices.push_back(std::move(row));
    }
    j["slices"] = std::move(slices);

    json failures = json::array();
    for (const auto & f : parse_failures) {
        failures.push_back(
            {{"persona", f.persona_id}, {"run", f.run}, {"failed", f.failed}, {"total", f.total}});
    }
    j["parse_failures"] = std::move(failures);

    return j.dump(2);
}

ReportBundle run_audit(const AuditConfig & config) {
    RunManifest manifest;
    manifest.started_at = iso8601_utc_now();

    std::vector<Instance> corpus = load_corpus(config.corpus_path, config.corpus_format);
    manifest.corpus_digest = corpus_file_digest(config.corpus_path);
    if (!corpus.empty() && corpus.front().task == Task::hate3 && config.filter_inconclusive) {
        corpus = filter_hatexplain(corpus);
    }
    if (config.sample) {
        corpus = sample_subset(corpus, config.sample->n, config.sample->seed);
    }
    if (corpus.empty()) throw ValidationError("run_audit: corpus is empty after filtering");

    std::vector<Persona> personas = resolve_personas(config.personas);
    std::vector<WorkItem> items = plan_run(corpus, personas, config.runs);

    std::map<std::string, const Instance *> inst_by_id;
    for (const auto & inst : corpus) inst_by_id[inst.id] = &inst;
    std::map<std::string, const Persona *> persona_by_id;
    for (const auto & p : personas) persona_by_id[p.id] = &p;

    std::shared_ptr<ResponseCache> cache;
    if (!config.cache_path.empty()) {
        fs::path parent = fs::path(config.cache_path).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        cache = std::make_shared<ResponseCache>(config.cache_path);
    }
    Provider provider(config.provider, cache, config.simulated);

    std::vector<std::string> texts(items.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (!failed.load()) {
            size_t i = next.fetch_add(1);
            if (i >= items.size()) break;
            try {
                const WorkItem & item = items[i];
                const Instance * inst = inst_by_id.at(item.instance_id);
                const Persona * persona = persona_by_id.at(item.persona_id);
                PromptSpec spec;
                spec.task = inst->task;
                spec.persona = *persona;
                spec.variant = config.variant;
                spec.reasoning_field = config.reasoning_field;
                CompletionRequest req;
                req.work_item_key = item.key;
                req.prompt = render(spec, *inst);
                req.instance = inst;
                req.persona = persona;
                req.run = item.run;
                texts[i] = provider.complete(req).text;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };

    size_t worker_count = std::min<size_t>(static_cast<size_t>(config.provider.max_parallel),
                                           std::max<size_t>(items.size(), 1));
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (size_t w = 0; w < worker_count; ++w) workers.emplace_back(worker);
    for (auto & t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<AnnotationRecord> records;
    records.reserve(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
        const Instance * inst = inst_by_id.at(items[i].instance_id);
        records.push_back(make_record(texts[i], *inst, items[i].persona_id, items[i].run,
                                      config.provider.model_name));
    }
    if (!config.records_path.empty()) {
        fs::path parent = fs::path(config.records_path).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        write_records(config.records_path, records);
    }

    ReportBundle bundle = analyze(config, corpus, personas, records);
    bundle.config_json = config_to_json(config);

    manifest.config_digest = digest_hex(bundle.config_json);
    manifest.registry_version = registry_version();
    manifest.template_hashes = template_hashes();
    manifest.provider_kind = provider_kind_name(config.provider.kind);
    manifest.model_name = config.provider.model_name;
    manifest.params_json = config.provider.params_json;
    manifest.reasoning_effort = config.provider.reasoning_effort;
    manifest.seed = config.seed;
    manifest.runs = config.runs;
    manifest.variant = prompt_variant_name(config.variant);
    manifest.instance_count = corpus.size();
    manifest.persona_count = personas.size();
    manifest.work_item_count = items.size();
    manifest.cache_hit_count = provider.cache_hits();
    manifest.finished_at = iso8601_utc_now();
    bundle.manifest = std::move(manifest);
    return bundle;
}

namespace {

void write_csv(const fs::path & path, const std::vector<std::vector<std::string>> & rows,
               std::vector<std::string> * written) {
    std::string out;
    for (const auto & row : rows) out += csv_row(row);
    write_text_file(path.string(), out);
    written->push_back(path.string());
}

std::string opt4(const std::optional<double> & v) {
    return v ? format_fixed4(*v) : "";
}

}  // namespace

std::vector<std::string> emit(const ReportBundle & bundle, const std::string & out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::exists(dir)) throw IoError("cannot create output directory: " + out_dir);

    std::vector<std::string> written;
    bool empty = bundle.scores.empty() && bundle.deltas.empty() && bundle.agreement.empty() &&
                 bundle.overflag.empty() && bundle.stuart_maxwell.empty() &&
                 bundle.label_distributions.empty() && bundle.disagreement.empty() &&
                 bundle.linguistics.empty() && bundle.slices.empty() &&
                 bundle.parse_failures.empty();
    write_text_file((dir / "manifest.json").string(), bundle.manifest.to_json());
    written.push_back((dir / "manifest.json").string());
    if (empty) return written;

    fs::path tables = dir / "tables";
    fs::create_directories(tables, ec);
    write_text_file((dir / "bundle.json").string(), bundle.to_json());
    written.push_back((dir / "bundle.json").string());
    if (!bundle.config_json.empty()) {
        write_text_file((dir / "config.json").string(), bundle.config_json);
        written.push_back((dir / "config.json").string());
    }

    if (!bundle.scores.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"persona", "gold_group", "metric", "unit", "run_count", "mean", "std",
                        "excluded_records"});
        for (const auto & s : bundle.scores) {
            rows.push_back({s.persona_id, s.gold_group, s.table.metric, s.table.unit,
                            std::to_string(s.table.per_run.size()), format_fixed4(s.table.mean),
                            format_fixed4(s.table.stddev), std::to_string(s.excluded_records)});
        }
        write_csv(tables / "scores.csv", rows, &written);

        rows.clear();
        rows.push_back({"persona", "gold_group", "metric", "run", "value"});
        for (const auto & s : bundle.scores) {
            for (size_t r = 0; r < s.table.per_run.size(); ++r) {
                rows.push_back({s.persona_id, s.gold_group, s.table.metric, std::to_string(r + 1),
                                format_fixed4(s.table.per_run[r])});
            }
        }
        write_csv(tables / "scores_runs.csv", rows, &written);
    }

    if (!bundle.deltas.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"persona", "gold_group", "metric", "delta_mean", "ci_low", "ci_high",
                        "significant", "paired_instances"});
        for (const auto & d : bundle.deltas) {
            rows.push_back({d.delta.persona_id, d.gold_group, d.delta.metric,
                            format_fixed4(d.delta.delta_mean), format_fixed4(d.delta.ci_low),
                            format_fixed4(d.delta.ci_high), d.delta.significant ? "true" : "false",
                            std::to_string(d.paired_instances)});
        }
        write_csv(tables / "deltas.csv", rows, &written);
    }

    if (!bundle.agreement.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"kind", "group", "mean", "std", "defined_runs"});
        for (const auto & a : bundle.agreement) {
            rows.push_back({a.kind, a.group, opt4(a.alpha.mean), opt4(a.alpha.stddev),
                            std::to_string(a.alpha.defined_runs)});
        }
        write_csv(tables / "agreement.csv", rows, &written);
    }

    if (!bundle.overflag.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"gold", "pred", "persona", "model", "rate"});
        for (const auto & o : bundle.overflag) {
            rows.push_back({o.gold_label, o.pred_label, o.persona_id, bundle.model_name,
                            format_fixed4(o.rate)});
        }
        write_csv(tables / "overflag.csv", rows, &written);
    }

    if (!bundle.stuart_maxwell.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"group", "persona_a", "persona_b", "statistic", "dof", "p",
                        "bonferroni_threshold", "significant", "collapsed_categories"});
        for (const auto & s : bundle.stuart_maxwell) {
            rows.push_back({s.group, s.persona_a, s.persona_b, format_fixed4(s.test.statistic),
                            std::to_string(s.test.dof), format_fixed4(s.test.p),
                            format_fixed4(s.threshold), s.significant ? "true" : "false",
                            std::to_string(s.test.collapsed_categories)});
        }
        write_csv(tables / "stuart_maxwell.csv", rows, &written);
    }

    if (!bundle.label_distributions.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"persona", "label", "fraction"});
        for (const auto & d : bundle.label_distributions) {
            rows.push_back({d.persona_id, d.label, format_fixed4(d.fraction)});
        }
        write_csv(tables / "label_distributions.csv", rows, &written);
    }

    if (!bundle.disagreement.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"group", "mean_rate", "run_count"});
        for (const auto & d : bundle.disagreement) {
            rows.push_back({d.group, format_fixed4(d.rate.mean),
                            std::to_string(d.rate.per_run.size())});
        }
        write_csv(tables / "disagreement.csv", rows, &written);
    }

    if (!bundle.linguistics.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"persona", "model", "avg_word_count", "avg_flesch", "records"});
        for (const auto & l : bundle.linguistics) {
            rows.push_back({l.persona_id, l.model_name, format_fixed4(l.avg_word_count),
                            format_fixed4(l.avg_flesch), std::to_string(l.record_count)});
        }
        write_csv(tables / "linguistics.csv", rows, &written);
    }

    if (!bundle.slices.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"subgroup", "n", "persona", "metric", "run_count", "mean", "std"});
        for (const auto & s : bundle.slices) {
            rows.push_back({s.subgroup, std::to_string(s.n), s.persona_id, s.table.metric,
                            std::to_string(s.table.per_run.size()), format_fixed4(s.table.mean),
                            format_fixed4(s.table.stddev)});
        }
        write_csv(tables / "slices.csv", rows, &written);
    }

    if (!bundle.parse_failures.empty()) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"persona", "run", "failed", "total"});
        for (const auto & f : bundle.parse_failures) {
            rows.push_back({f.persona_id, std::to_string(f.run), std::to_string(f.failed),
                            std::to_string(f.total)});
        }
        write_csv(tables / "parse_failures.csv", rows, &written);
    }

    return written;
}

}  // namespace ppaudit
