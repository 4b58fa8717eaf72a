#include "ppaudit/agreement.hpp"

#include "ppaudit/util.hpp"

#include <algorithm>
#include <cmath>

namespace ppaudit {

std::optional<double> krippendorff_alpha(const ReliabilityData & data) {
    size_t annotators = 0;
    for (const auto & row : data.values) annotators = std::max(annotators, row.size());
    if (annotators < 2) throw ValidationError("krippendorff_alpha: need at least 2 annotators");

    // category universe (sorted ascending; numeric order = ordinal order)
    std::vector<int> cats;
    for (const auto & row : data.values) {
        for (const auto & v : row) {
            if (!v) continue;
            if (data.scale && (*v < data.scale->first || *v > data.scale->second)) {
                throw ValidationError("krippendorff_alpha: value " + std::to_string(*v) +
                                      " outside the declared scale");
            }
            cats.push_back(*v);
        }
    }
    if (data.scale) {
        for (int c = data.scale->first; c <= data.scale->second; ++c) cats.push_back(c);
    }
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    if (cats.empty()) return std::nullopt;
    std::map<int, size_t> cat_index;
    for (size_t i = 0; i < cats.size(); ++i) cat_index[cats[i]] = i;
    size_t k = cats.size();

    // coincidence matrix: each ordered within-unit pair weighted 1/(m_u - 1)
    std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
    for (const auto & row : data.values) {
        std::vector<size_t> present;
        for (const auto & v : row) {
            if (v) present.push_back(cat_index.at(*v));
        }
        size_t m = present.size();
        if (m < 2) continue;  // deficient unit
        double w = 1.0 / static_cast<double>(m - 1);
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                o[present[i]][present[j]] += w;
            }
        }
    }

    std::vector<double> marginal(k, 0.0);
    double n = 0.0;
    for (size_t c = 0; c < k; ++c) {
        for (size_t g = 0; g < k; ++g) marginal[c] += o[c][g];
        n += marginal[c];
    }
    if (n <= 1.0) return std::nullopt;

    auto delta = [&](size_t c, size_t g) -> double {
        if (data.level == AlphaLevel::nominal) return c == g ? 0.0 : 1.0;
        size_t lo = std::min(c, g);
        size_t hi = std::max(c, g);
        double between = 0.0;
        for (size_t t = lo; t <= hi; ++t) between += marginal[t];
        double d = between - (marginal[c] + marginal[g]) / 2.0;
        return d * d;
    };

    double observed = 0.0;  // sum_{c<g} o_cg * delta
    double expected = 0.0;  // sum_{c<g} n_c * n_g * delta
    for (size_t c = 0; c < k; ++c) {
        for (size_t g = c + 1; g < k; ++g) {
            double d = delta(c, g);
            observed += o[c][g] * d;
            expected += marginal[c] * marginal[g] * d;
        }
    }
    if (expected == 0.0) return std::nullopt;
    return 1.0 - (n - 1.0) * observed / expected;
}

namespace {

struct GroupSpec {
    std::string name;
    std::vector<std::string> persona_ids;
};

std::vector<GroupSpec> make_groups(const std::vector<Persona> & personas) {
    std::map<std::string, std::vector<std::string>> singles;
    std::vector<std::string> composites;
    for (const auto & p : personas) {
        if (auto g = group_of(p)) {
            singles[*g].push_back(p.id);
        } else if (p.kind == PersonaKind::composite) {
            composites.push_back(p.id);
        }
    }
    std::vector<GroupSpec> out;
    for (auto & [name, ids] : singles) {
        if (ids.size() >= 2) out.push_back({name, std::move(ids)});
    }
    if (composites.size() >= 2) out.push_back({"composite", std::move(composites)});
    return out;
}

AlphaSummary summarize(std::vector<std::optional<double>> per_run) {
    AlphaSummary s;
    s.per_run = std::move(per_run);
    std::vector<double> defined;
    for (const auto & a : s.per_run) {
        if (a) defined.push_back(*a);
    }
    s.defined_runs = static_cast<int>(defined.size());
    if (!defined.empty()) {
        s.mean = mean_of(defined);
        s.stddev = stddev_of(defined);
    }
    return s;
}

// record lookup keyed by (instance, persona, run); failed parses excluded
using RecordIndex = std::map<std::tuple<std::string, std::string, int>, const AnnotationRecord *>;

RecordIndex index_records(const std::vector<AnnotationRecord> & records) {
    RecordIndex idx;
    for (const auto & r : records) {
        if (r.parse_status == ParseStatus::failed) continue;
        idx[{r.instance_id, r.persona_id, r.run}] = &r;
    }
    return idx;
}

std::vector<std::string> ordered_instances(const std::vector<AnnotationRecord> & records) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto & r : records) {
        if (seen.insert(r.instance_id).second) out.push_back(r.instance_id);
    }
    return out;
}

}  // namespace

std::map<std::string, AlphaSummary> label_agreement_by_group(
    const std::vector<AnnotationRecord> & records, Task task,
    const std::vector<Persona> & personas, int runs) {
    RecordIndex idx = index_records(records);
    std::vector<std::string> instances = ordered_instances(records);
    std::map<std::string, AlphaSummary> out;
    for (const auto & group : make_groups(personas)) {
        std::vector<std::optional<double>> per_run;
        for (int run = 1; run <= runs; ++run) {
            ReliabilityData data;
            data.level = task == Task::hate3 ? AlphaLevel::ordinal : AlphaLevel::nominal;
            if (task == Task::hate3) data.scale = {0, 2};
            for (const auto & inst : instances) {
                std::vector<std::optional<int>> row;
                for (const auto & pid : group.persona_ids) {
                    auto it = idx.find({inst, pid, run});
                    if (it != idx.end() && it->second->label) {
                        row.push_back(*it->second->label);
                    } else {
                        row.push_back(std::nullopt);
                    }
                }
                data.values.push_back(std::move(row));
            }
            per_run.push_back(krippendorff_alpha(data));
        }
        out[group.name] = summarize(std::move(per_run));
    }
    return out;
}

std::map<std::string, AlphaSummary> rationale_agreement_by_group(
    const std::vector<AnnotationRecord> & records,
    const std::vector<Persona> & personas, int runs) {
    RecordIndex idx = index_records(records);
    std::vector<std::string> instances = ordered_instances(records);
    // token count per instance, taken from the first parsed record's mask
    std::map<std::string, size_t> token_counts;
    for (const auto & r : records) {
        if (r.parse_status == ParseStatus::failed) continue;
        auto [it, inserted] = token_counts.emplace(r.instance_id, r.rationale_mask.size());
        if (!inserted && it->second != r.rationale_mask.size()) {
            throw ValidationError("inconsistent mask lengths for instance " + r.instance_id);
        }
    }
    std::map<std::string, AlphaSummary> out;
    for (const auto & group : make_groups(personas)) {
        std::vector<std::optional<double>> per_run;
        for (int run = 1; run <= runs; ++run) {
            ReliabilityData data;
            data.level = AlphaLevel::nominal;
            for (const auto & inst : instances) {
                auto tc = token_counts.find(inst);
                if (tc == token_counts.end()) continue;
                std::vector<const AnnotationRecord *> recs;
                for (const auto & pid : group.persona_ids) {
                    auto it = idx.find({inst, pid, run});
                    recs.push_back(it != idx.end() ? it->second : nullptr);
                }
                for (size_t t = 0; t < tc->second; ++t) {
                    std::vector<std::optional<int>> row;
                    for (const auto * rec : recs) {
                        if (rec && t < rec->rationale_mask.size()) {
                            row.push_back(static_cast<int>(rec->rationale_mask[t]));
                        } else {
                            row.push_back(std::nullopt);
                        }
                    }
                    data.values.push_back(std::move(row));
                }
            }
            per_run.push_back(krippendorff_alpha(data));
        }
        out[group.name] = summarize(std::move(per_run));
    }
    return out;
}

}  // namespace ppaudit
