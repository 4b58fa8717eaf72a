#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ppaudit {

enum class Task { hate3, cose, sst3 };

std::string task_name(Task t);
std::optional<Task> task_from_name(std::string_view name);

// Canonical label list for a task, in ordinal order where one exists
// (hate3: Normal < Offensive language < Hate speech). cose has no fixed
// label list; its labels are option indices.
const std::vector<std::string> & label_names(Task t);

// Case-insensitive normalization of a raw label string to a label index.
// Accepts dataset spellings and common model aliases ("offensive",
// "hatespeech", "neutral", ...). Returns nullopt when unmappable.
std::optional<int> normalize_label(Task t, std::string_view raw);

struct Token {
    int index = 0;
    std::string surface;
};

struct GoldAnnotation {
    int label = -1;                        // label index (option index for cose)
    std::vector<uint8_t> rationale_mask;   // always token-count long; absent in input => all-zero
    int annotator_count = 1;
};

struct Instance {
    std::string id;
    Task task = Task::hate3;
    std::vector<Token> tokens;
    // Gold annotations keyed by group id. BRWRR: {BY,BO,WY,WO,LY,LO}.
    // HateXplain: "ann0".."ann2" plus a derived "majority" entry when at
    // least two annotators agree on the label.
    std::map<std::string, GoldAnnotation> gold;
    std::set<std::string> targets;         // hate3 only
    std::vector<std::string> options;      // cose only

    std::string text() const;              // tokens joined by single spaces
    bool has_canonical_gold() const;
    // hate3: the majority annotation. BRWRR: majority vote across the six
    // group labels (ties toward the lower index) with tokens marked by at
    // least half of the groups.
    GoldAnnotation canonical_gold() const;
};

enum class CorpusFormat { hatexplain_json, brwrr_json };

std::optional<CorpusFormat> corpus_format_from_name(std::string_view name);

// Loads a JSONL corpus file, validating every instance. Mask/token length
// mismatches and format violations raise ValidationError naming the
// offending instance id and field.
std::vector<Instance> load_corpus(const std::string & path, CorpusFormat format);

// Drops instances whose three annotator labels are pairwise distinct, and
// instances with fewer than three rationale-bearing annotations unless the
// majority label is Normal. Survivors are guaranteed to carry a "majority"
// gold entry.
std::vector<Instance> filter_hatexplain(const std::vector<Instance> & instances);

// Deterministic n-out-of-N sample. Input order is preserved within the
// sample; the selection is a pure function of (instances, n, seed).
std::vector<Instance> sample_subset(const std::vector<Instance> & instances, size_t n, uint64_t seed);

// Target subgroups for hate3 slicing.
inline constexpr const char * kSliceGender = "Gender";
inline constexpr const char * kSliceRace = "Race/Ethnicity";
inline constexpr const char * kSliceReligion = "Religion";
inline constexpr const char * kSliceNoTarget = "NoTarget";

// Slices hate3 instances by target demographic. An instance joins every
// subgroup one of its target tags maps to; instances whose tags map to no
// subgroup (including the empty set and "None") land in NoTarget, so the
// union of slices covers the input.
std::map<std::string, std::vector<Instance>> slice_by_target(const std::vector<Instance> & instances);

// BRWRR demographic group ids, fixed order.
const std::vector<std::string> & brwrr_groups();

// FNV digest of the raw corpus file bytes, recorded in run manifests.
std::string corpus_file_digest(const std::string & path);

}  // namespace ppaudit
