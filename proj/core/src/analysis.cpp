#include "ppaudit/report.hpp"

#include "ppaudit/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ppaudit {

namespace {

struct RecordKey {
    std::string instance_id;
    std::string persona_id;
    int run;
    bool operator<(const RecordKey & o) const {
        return std::tie(instance_id, persona_id, run) < std::tie(o.instance_id, o.persona_id, o.run);
    }
};

using RecordIndex = std::map<RecordKey, const AnnotationRecord *>;

RecordIndex index_parsed(const std::vector<AnnotationRecord> & records) {
    RecordIndex idx;
    for (const auto & r : records) {
        if (r.parse_status == ParseStatus::failed || !r.label) continue;
        idx[{r.instance_id, r.persona_id, r.run}] = &r;
    }
    return idx;
}

// gold groups evaluated against: hate3 uses the derived majority; BRWRR
// evaluates each demographic group against its own gold
std::vector<std::string> gold_groups(Task task, const std::vector<Instance> & corpus) {
    if (task == Task::hate3) return {"majority"};
    std::vector<std::string> present;
    for (const auto & g : brwrr_groups()) {
        bool everywhere = !corpus.empty();
        for (const auto & inst : corpus) {
            if (!inst.gold.count(g)) {
                everywhere = false;
                break;
            }
        }
        if (everywhere) present.push_back(g);
    }
    if (present.empty() && !corpus.empty()) {
        // fall back to whatever groups the first instance carries
        for (const auto & [g, ann] : corpus.front().gold) present.push_back(g);
    }
    return present;
}

struct PersonaGroups {
    // attribute category -> persona ids (only groups with >= 2 members),
    // plus "composite" covering the composite personas
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
};

PersonaGroups attribute_groups(const std::vector<Persona> & personas) {
    std::map<std::string, std::vector<std::string>> singles;
    std::vector<std::string> composites;
    for (const auto & p : personas) {
        if (auto g = group_of(p)) singles[*g].push_back(p.id);
        else if (p.kind == PersonaKind::composite) composites.push_back(p.id);
    }
    PersonaGroups out;
    for (auto & [name, ids] : singles) {
        if (ids.size() >= 2) out.groups.emplace_back(name, std::move(ids));
    }
    if (composites.size() >= 2) out.groups.emplace_back("composite", std::move(composites));
    return out;
}

std::vector<std::string> task_metrics(Task task) {
    switch (task) {
        case Task::hate3: return {"macro_f1", "mae", "me", "token_f1", "iou_f1"};
        case Task::cose: return {"accuracy", "token_f1", "iou_f1"};
        case Task::sst3: return {"macro_f1", "accuracy", "token_f1", "iou_f1"};
    }
    return {};
}

// metrics whose per-instance decomposition feeds the bootstrap
std::vector<std::string> delta_metrics(Task task) {
    switch (task) {
        case Task::hate3: return {"mae", "me", "token_f1", "iou_f1"};
        case Task::cose: return {"accuracy", "token_f1", "iou_f1"};
        case Task::sst3: return {"accuracy", "token_f1", "iou_f1"};
    }
    return {};
}

bool rationale_excluded(Task task, const GoldAnnotation & gold) {
    // hate3 rationale metrics skip gold-Normal instances (no annotated
    // rationales exist for them)
    return task == Task::hate3 && gold.label == 0;
}

struct Analyzer {
    const AuditConfig & config;
    const std::vector<Instance> & corpus;
    const std::vector<Persona> & personas;
    const std::vector<AnnotationRecord> & records;
    Task task;
    RecordIndex parsed;
    std::map<std::string, const Instance *> by_id;
    ReportBundle bundle;

    Analyzer(const AuditConfig & cfg, const std::vector<Instance> & corp,
             const std::vector<Persona> & pers, const std::vector<AnnotationRecord> & recs)
        : config(cfg), corpus(corp), personas(pers), records(recs) {
        if (corpus.empty()) throw ValidationError("analyze: empty corpus");
        task = corpus.front().task;
        for (const auto & inst : corpus) {
            if (inst.task != task) throw ValidationError("analyze: mixed-task corpus");
            by_id[inst.id] = &inst;
        }
        parsed = index_parsed(records);
        bundle.task = task;
        bundle.model_name = config.provider.model_name;
    }

    const AnnotationRecord * find(const std::string & inst, const std::string & persona, int run) const {
        auto it = parsed.find({inst, persona, run});
        return it == parsed.end() ? nullptr : it->second;
    }

    // per-run metric value over parsed records of one persona/group;
    // nullopt when the run has no usable records
    std::optional<double> run_metric(const std::string & metric, const Persona & persona,
                                     const std::string & group, int run) const {
        std::vector<int> pred;
        std::vector<int> gold;
        std::vector<MaskPair> masks;
        for (const auto & inst : corpus) {
            auto git = inst.gold.find(group);
            if (git == inst.gold.end()) continue;
            const AnnotationRecord * rec = find(inst.id, persona.id, run);
            if (!rec) continue;
            pred.push_back(*rec->label);
            gold.push_back(git->second.label);
            if (!rationale_excluded(task, git->second)) {
                masks.push_back({rec->rationale_mask, git->second.rationale_mask});
            }
        }
        if (metric == "token_f1" || metric == "iou_f1") {
            if (masks.empty()) return std::nullopt;
            if (metric == "token_f1") {
                return 100.0 * mean_token_f1(masks, config.metrics.token_f1_both_empty_one);
            }
            return 100.0 * iou_f1(masks, config.metrics.iou_threshold);
        }
        if (pred.empty()) return std::nullopt;
        if (metric == "accuracy") return 100.0 * accuracy(pred, gold);
        if (metric == "macro_f1") {
            std::set<int> excluded;
            if (task == Task::sst3) excluded.insert(2);  // "No sentiment"
            int classes = task == Task::cose ? 0 : 3;
            if (task == Task::cose) return std::nullopt;
            return 100.0 * macro_f1(pred, gold, classes, excluded);
        }
        if (metric == "mae") return mae_percent(pred, gold);
        if (metric == "me") return mean_error_percent(pred, gold);
        throw ValidationError("unknown metric: " + metric);
    }

    void compute_scores() {
        for (const auto & persona : personas) {
            int failures = 0;
            for (const auto & r : records) {
                if (r.persona_id == persona.id && r.parse_status == ParseStatus::failed) ++failures;
            }
            for (const auto & group : gold_groups(task, corpus)) {
                for (const auto & metric : task_metrics(task)) {
                    std::vector<double> per_run;
                    for (int run = 1; run <= config.runs; ++run) {
                        if (auto v = run_metric(metric, persona, group, run)) per_run.push_back(*v);
                    }
                    if (per_run.empty()) continue;
                    ScoreRow row;
                    row.persona_id = persona.id;
                    row.gold_group = group;
                    row.table = make_score_table(metric, std::move(per_run));
                    row.excluded_records = failures;
                    bundle.scores.push_back(std::move(row));
                }
            }
        }
    }

    // run-averaged per-instance score; nullopt when no run parsed or the
    // instance is excluded for this metric
    std::optional<double> instance_score(const std::string & metric, const Instance & inst,
                                         const std::string & persona_id,
                                         const GoldAnnotation & gold) const {
        bool mask_metric = metric == "token_f1" || metric == "iou_f1";
        if (mask_metric && rationale_excluded(task, gold)) return std::nullopt;
        std::vector<double> values;
        for (int run = 1; run <= config.runs; ++run) {
            const AnnotationRecord * rec = find(inst.id, persona_id, run);
            if (!rec) continue;
            if (metric == "mae") {
                values.push_back(100.0 * std::abs(*rec->label - gold.label));
            } else if (metric == "me") {
                values.push_back(100.0 * (*rec->label - gold.label));
            } else if (metric == "accuracy") {
                values.push_back(*rec->label == gold.label ? 100.0 : 0.0);
            } else if (metric == "token_f1") {
                values.push_back(100.0 * token_f1(rec->rationale_mask, gold.rationale_mask,
                                                  config.metrics.token_f1_both_empty_one));
            } else if (metric == "iou_f1") {
                values.push_back(iou(rec->rationale_mask, gold.rationale_mask) >=
                                         config.metrics.iou_threshold
                                     ? 100.0
                                     : 0.0);
            }
        }
        if (values.empty()) return std::nullopt;
        return mean_of(values);
    }

    void compute_deltas() {
        const Persona * baseline = nullptr;
        for (const auto & p : personas) {
            if (p.kind == PersonaKind::baseline) baseline = &p;
        }
        if (!baseline) return;
        for (const auto & persona : personas) {
            if (persona.kind == PersonaKind::baseline) continue;
            for (const auto & group : gold_groups(task, corpus)) {
                for (const auto & metric : delta_metrics(task)) {
                    std::vector<double> persona_scores;
                    std::vector<double> baseline_scores;
                    for (const auto & inst : corpus) {
                        auto git = inst.gold.find(group);
                        if (git == inst.gold.end()) continue;
                        auto pv = instance_score(metric, inst, persona.id, git->second);
                        auto bv = instance_score(metric, inst, baseline->id, git->second);
                        if (pv && bv) {
                            persona_scores.push_back(*pv);
                            baseline_scores.push_back(*bv);
                        }
                    }
                    if (persona_scores.empty()) continue;
                    BootstrapConfig bs = config.metrics.bootstrap;
                    bs.seed = mix_seed(config.metrics.bootstrap.seed,
                                       fnv1a64(persona.id + "|" + metric + "|" + group));
                    DeltaRow row;
                    row.gold_group = group;
                    row.delta = bootstrap_delta(persona_scores, baseline_scores, bs);
                    row.delta.persona_id = persona.id;
                    row.delta.metric = metric;
                    row.paired_instances = persona_scores.size();
                    bundle.deltas.push_back(std::move(row));
                }
            }
        }
    }

    void compute_agreement() {
        auto labels = label_agreement_by_group(records, task, personas, config.runs);
        for (auto & [group, alpha] : labels) {
            bundle.agreement.push_back({"labels", group, std::move(alpha)});
        }
        auto rationales = rationale_agreement_by_group(records, personas, config.runs);
        for (auto & [group, alpha] : rationales) {
            bundle.agreement.push_back({"rationales", group, std::move(alpha)});
        }
    }

    void compute_overflag() {
        if (task != Task::hate3) return;
        const auto & names = label_names(task);
        for (const auto & persona : personas) {
            std::map<std::pair<int, int>, std::pair<double, int>> acc;  // sum, defined runs
            for (int run = 1; run <= config.runs; ++run) {
                std::vector<int> pred;
                std::vector<int> gold;
                for (const auto & inst : corpus) {
                    auto git = inst.gold.find("majority");
                    if (git == inst.gold.end()) continue;
                    const AnnotationRecord * rec = find(inst.id, persona.id, run);
                    if (!rec) continue;
                    pred.push_back(*rec->label);
                    gold.push_back(git->second.label);
                }
                if (pred.empty()) continue;
                for (const auto & [cell, rate] : overflag_matrix(pred, gold, 3)) {
                    auto & slot = acc[cell];
                    slot.first += rate;
                    slot.second += 1;
                }
            }
            for (const auto & [cell, slot] : acc) {
                OverflagRow row;
                row.persona_id = persona.id;
                row.gold_label = names[static_cast<size_t>(cell.first)];
                row.pred_label = names[static_cast<size_t>(cell.second)];
                row.rate = slot.first / slot.second;
                bundle.overflag.push_back(std::move(row));
            }
        }
    }

    void compute_stuart_maxwell() {
        if (task == Task::cose) return;  // option sets differ per instance
        for (const auto & [group, ids] : attribute_groups(personas).groups) {
            std::vector<std::pair<std::string, std::string>> pairs;
            for (size_t i = 0; i < ids.size(); ++i) {
                for (size_t j = i + 1; j < ids.size(); ++j) pairs.emplace_back(ids[i], ids[j]);
            }
            if (pairs.empty()) continue;
            double threshold = bonferroni_threshold(static_cast<int>(pairs.size()));
            for (const auto & [a, b] : pairs) {
                std::vector<int> la;
                std::vector<int> lb;
                for (const auto & inst : corpus) {
                    for (int run = 1; run <= config.runs; ++run) {
                        const AnnotationRecord * ra = find(inst.id, a, run);
                        const AnnotationRecord * rb = find(inst.id, b, run);
                        if (ra && rb) {
                            la.push_back(*ra->label);
                            lb.push_back(*rb->label);
                        }
                    }
                }
                if (la.empty()) continue;
                StuartMaxwellRow row;
                row.group = group;
                row.persona_a = a;
                row.persona_b = b;
                row.test = stuart_maxwell(la, lb, 3);
                row.threshold = threshold;
                row.significant = row.test.p < threshold;
                bundle.stuart_maxwell.push_back(std::move(row));
            }
        }
    }

    void compute_label_distributions() {
        if (task == Task::cose) return;
        const auto & names = label_names(task);
        for (const auto & persona : personas) {
            std::vector<long> counts(names.size(), 0);
            long total = 0;
            for (const auto & r : records) {
                if (r.persona_id != persona.id || r.parse_status == ParseStatus::failed || !r.label) continue;
                if (*r.label >= 0 && *r.label < static_cast<int>(names.size())) {
                    ++counts[static_cast<size_t>(*r.label)];
                    ++total;
                }
            }
            if (total == 0) continue;
            for (size_t c = 0; c < names.size(); ++c) {
                bundle.label_distributions.push_back(
                    {persona.id, names[c], static_cast<double>(counts[c]) / static_cast<double>(total)});
            }
        }
    }

    void compute_disagreement() {
        for (const auto & [group, ids] : attribute_groups(personas).groups) {
            bundle.disagreement.push_back({group, disagreement_rate(records, ids, config.runs)});
        }
    }

    void compute_slices() {
        if (task != Task::hate3) return;
        auto slices = slice_by_target(corpus);
        for (const auto & [subgroup, insts] : slices) {
            if (insts.empty()) continue;
            std::set<std::string> slice_ids;
            for (const auto & inst : insts) slice_ids.insert(inst.id);
            for (const auto & persona : personas) {
                std::vector<double> per_run;
                for (int run = 1; run <= config.runs; ++run) {
                    std::vector<int> pred;
                    std::vector<int> gold;
                    for (const auto & inst : insts) {
                        auto git = inst.gold.find("majority");
                        if (git == inst.gold.end()) continue;
                        const AnnotationRecord * rec = find(inst.id, persona.id, run);
                        if (!rec) continue;
                        pred.push_back(*rec->label);
                        gold.push_back(git->second.label);
                    }
                    if (!pred.empty()) per_run.push_back(mae_percent(pred, gold));
                }
                if (per_run.empty()) continue;
                SliceScoreRow row;
                row.subgroup = subgroup;
                row.n = insts.size();
                row.persona_id = persona.id;
                row.table = make_score_table("mae", std::move(per_run));
                bundle.slices.push_back(std::move(row));
            }
        }
    }

    void compute_parse_failures() {
        for (const auto & persona : personas) {
            for (int run = 1; run <= config.runs; ++run) {
                long failed = 0;
                long total = 0;
                for (const auto & r : records) {
                    if (r.persona_id != persona.id || r.run != run) continue;
                    ++total;
                    if (r.parse_status == ParseStatus::failed) ++failed;
                }
                if (total == 0) continue;
                bundle.parse_failures.push_back({persona.id, run, failed, total});
            }
        }
    }

    void compute_linguistics() { bundle.linguistics = profile_by_persona(records); }
};

}  // namespace

ReportBundle analyze(const AuditConfig & config, const std::vector<Instance> & corpus,
                     const std::vector<Persona> & personas,
                     const std::vector<AnnotationRecord> & records) {
    Analyzer a(config, corpus, personas, records);
    a.compute_scores();
    a.compute_deltas();
    a.compute_agreement();
    a.compute_overflag();
    a.compute_stuart_maxwell();
    a.compute_label_distributions();
    a.compute_disagreement();
    a.compute_linguistics();
    a.compute_slices();
    a.compute_parse_failures();
    return std::move(a.bundle);
}

}  // namespace ppaudit
