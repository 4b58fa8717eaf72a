#pragma once

#include "ppaudit/corpus.hpp"
#include "ppaudit/parsing.hpp"
#include "ppaudit/personas.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ppaudit {

enum class AlphaLevel { nominal, ordinal };

// Units x annotators value matrix with missing entries allowed.
// Categories are integers; for the ordinal level their numeric order is the
// category order.
struct ReliabilityData {
    std::vector<std::vector<std::optional<int>>> values;  // [unit][annotator]
    AlphaLevel level = AlphaLevel::nominal;
    // Optional closed category range (inclusive). Keeps the ordinal scale
    // fixed across slices even when some categories go unobserved; with the
    // marginal-based ordinal distance this is numerically inert, but it
    // also validates that observed values stay in range.
    std::optional<std::pair<int, int>> scale;
};

// Krippendorff's alpha via the coincidence-matrix formulation.
// Units with fewer than two present values are dropped. Returns nullopt
// when agreement is undefined (no usable units, or expected disagreement
// is zero because a single category occurs everywhere).
// Requires >= 2 annotator columns.
std::optional<double> krippendorff_alpha(const ReliabilityData & data);

struct AlphaSummary {
    std::vector<std::optional<double>> per_run;
    std::optional<double> mean;     // over the runs where alpha is defined
    std::optional<double> stddev;
    int defined_runs = 0;
};

// Inter-persona agreement on predicted labels, one row per attribute group
// (the seven single-attribute categories, plus "composite" when at least
// two composite personas are present). Units are instances; hate3 labels
// are treated as ordinal, others nominal. Failed parses count as missing.
std::map<std::string, AlphaSummary> label_agreement_by_group(
    const std::vector<AnnotationRecord> & records, Task task,
    const std::vector<Persona> & personas, int runs);

// Same grouping over rationale masks: units are (instance, token) pairs
// with nominal 0/1 values.
std::map<std::string, AlphaSummary> rationale_agreement_by_group(
    const std::vector<AnnotationRecord> & records,
    const std::vector<Persona> & personas, int runs);

}  // namespace ppaudit
