#pragma once

#include "ppaudit/agreement.hpp"
#include "ppaudit/corpus.hpp"
#include "ppaudit/metrics.hpp"
#include "ppaudit/parsing.hpp"
#include "ppaudit/personas.hpp"
#include "ppaudit/prompting.hpp"
#include "ppaudit/provider.hpp"
#include "ppaudit/readability.hpp"
#include "ppaudit/stats.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ppaudit {

struct SampleConfig {
    size_t n = 0;
    uint64_t seed = 0;
};

struct MetricConfig {
    double iou_threshold = 0.5;
    bool token_f1_both_empty_one = true;
    BootstrapConfig bootstrap;
};

struct AuditConfig {
    CorpusFormat corpus_format = CorpusFormat::hatexplain_json;
    std::string corpus_path;
    // Persona ids and/or selectors ("baseline", "singles", "composites",
    // "all"). The baseline condition is always included so deltas are
    // computable from a single invocation.
    std::vector<std::string> personas = {"singles"};
    ProviderConfig provider;
    SimulatedAnnotatorParams simulated;
    int runs = 3;
    uint64_t seed = 42;
    PromptVariant variant = PromptVariant::cot;
    bool reasoning_field = false;
    std::optional<SampleConfig> sample;
    MetricConfig metrics;
    bool filter_inconclusive = true;  // hate3: drop inconclusive/underscored instances
    std::string cache_path;    // responses.jsonl; empty disables caching
    std::string records_path;  // records.jsonl; empty disables persistence
};

AuditConfig load_config(const std::string & path);
AuditConfig config_from_json_text(const std::string & text, const std::string & origin);
// Resolved config serialized back to JSON (the API key itself is never part
// of the config, only the env var name).
std::string config_to_json(const AuditConfig & config);

std::vector<Persona> resolve_personas(const std::vector<std::string> & selection);

struct RunManifest {
    std::string config_digest;
    std::string corpus_digest;
    std::string registry_version;
    std::map<std::string, std::string> template_hashes;
    std::string provider_kind;
    std::string model_name;
    std::string params_json;
    std::optional<std::string> reasoning_effort;
    uint64_t seed = 0;
    int runs = 0;
    std::string variant;
    size_t instance_count = 0;
    size_t persona_count = 0;
    size_t work_item_count = 0;
    size_t cache_hit_count = 0;
    std::string started_at;
    std::string finished_at;
    std::string to_json() const;
};

struct ScoreRow {
    std::string persona_id;
    std::string gold_group;  // "majority" for hate3, BY..LO for BRWRR
    ScoreTable table;
    int excluded_records = 0;  // parse failures excluded from the denominator
};

struct DeltaRow {
    std::string gold_group;
    PairedDelta delta;
    size_t paired_instances = 0;
};

struct AgreementRow {
    std::string kind;  // "labels" | "rationales"
    std::string group;
    AlphaSummary alpha;
};

struct OverflagRow {
    std::string persona_id;
    std::string gold_label;
    std::string pred_label;
    double rate = 0.0;  // mean over runs
};

struct StuartMaxwellRow {
    std::string group;
    std::string persona_a;
    std::string persona_b;
    StuartMaxwellResult test;
    double threshold = 0.05;
    bool significant = false;
};

struct LabelDistributionRow {
    std::string persona_id;
    std::string label;
    double fraction = 0.0;  // of parsed records, pooled over runs
};

struct DisagreementRow {
    std::string group;
    DisagreementRate rate;
};

struct SliceScoreRow {
    std::string subgroup;
    size_t n = 0;
    std::string persona_id;
    ScoreTable table;
};

struct ParseFailureRow {
    std::string persona_id;
    int run = 0;
    long failed = 0;
    long total = 0;
};

struct ReportBundle {
    Task task = Task::hate3;
    std::string model_name;
    std::vector<ScoreRow> scores;
    std::vector<DeltaRow> deltas;
    std::vector<AgreementRow> agreement;
    std::vector<OverflagRow> overflag;
    std::vector<StuartMaxwellRow> stuart_maxwell;
    std::vector<LabelDistributionRow> label_distributions;
    std::vector<DisagreementRow> disagreement;
    std::vector<LinguisticsRow> linguistics;
    std::vector<SliceScoreRow> slices;
    std::vector<ParseFailureRow> parse_failures;
    RunManifest manifest;
    std::string config_json;

    // Timestamp-free serialization; byte-identical across runs with the
    // same config and seed under the simulated provider.
    std::string to_json() const;
};

// All analyses recomputed from parsed records (no provider traffic).
ReportBundle analyze(const AuditConfig & config, const std::vector<Instance> & corpus,
                     const std::vector<Persona> & personas,
                     const std::vector<AnnotationRecord> & records);

// Full pipeline: plan -> provider -> parsing -> analyze. Resumable through
// the response cache; a transport failure aborts with the partial cache
// preserved on disk.
ReportBundle run_audit(const AuditConfig & config);

// Writes bundle.json, manifest.json, config.json and one CSV per non-empty
// table family into out_dir. Re-emitting the same bundle yields identical
// bytes.
std::vector<std::string> emit(const ReportBundle & bundle, const std::string & out_dir);

}  // namespace ppaudit
