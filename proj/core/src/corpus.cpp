#include "ppaudit/corpus.hpp"

#include "ppaudit/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using nlohmann::json;

namespace ppaudit {

std::string task_name(Task t) {
    switch (t) {
        case Task::hate3: return "hate3";
        case Task::cose: return "cose";
        case Task::sst3: return "sst3";
    }
    return "?";
}

std::optional<Task> task_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "hate3" || n == "hatexplain") return Task::hate3;
    if (n == "cose" || n == "cos-e") return Task::cose;
    if (n == "sst3" || n == "sst" || n == "sst-2" || n == "sst2") return Task::sst3;
    return std::nullopt;
}

const std::vector<std::string> & label_names(Task t) {
    static const std::vector<std::string> hate = {"Normal", "Offensive language", "Hate speech"};
    static const std::vector<std::string> sst = {"Positive", "Negative", "No sentiment"};
    static const std::vector<std::string> none = {};
    switch (t) {
        case Task::hate3: return hate;
        case Task::sst3: return sst;
        case Task::cose: return none;
    }
    return none;
}

namespace {

std::string squash(std::string_view raw) {
    // lowercase, collapse separators so "hate_speech" == "hate speech"
    std::string out;
    for (char ch : raw) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c == '_' || c == '-') {
            out += ' ';
        } else {
            out += static_cast<char>(std::tolower(c));
        }
    }
    std::string collapsed;
    bool prev_space = true;
    for (char c : out) {
        if (c == ' ') {
            if (!prev_space) collapsed += ' ';
            prev_space = true;
        } else {
            collapsed += c;
            prev_space = false;
        }
    }
    while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
    return collapsed;
}

}  // namespace

std::optional<int> normalize_label(Task t, std::string_view raw) {
    std::string key = squash(trim(raw));
    if (key.empty()) return std::nullopt;
    if (t == Task::hate3) {
        if (key == "normal") return 0;
        if (key == "offensive" || key == "offensive language" || key == "offensive speech") return 1;
        if (key == "hate" || key == "hatespeech" || key == "hate speech" || key == "hateful") return 2;
        return std::nullopt;
    }
    if (t == Task::sst3) {
        if (key == "positive" || key == "pos") return 0;
        if (key == "negative" || key == "neg") return 1;
        if (key == "no sentiment" || key == "nosentiment" || key == "neutral" || key == "none") return 2;
        return std::nullopt;
    }
    return std::nullopt;
}

std::string Instance::text() const {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i].surface;
    }
    return out;
}

bool Instance::has_canonical_gold() const {
    if (task == Task::hate3) return gold.count("majority") > 0;
    return !gold.empty();
}

GoldAnnotation Instance::canonical_gold() const {
    if (task == Task::hate3) {
        auto it = gold.find("majority");
        if (it == gold.end()) {
            throw ValidationError("instance " + id + " has no majority gold (run filter_hatexplain first)");
        }
        return it->second;
    }
    if (gold.empty()) throw ValidationError("instance " + id + " has no gold annotations");
    // majority vote across groups, ties toward the lower label index
    std::map<int, int> votes;
    for (const auto & [g, ann] : gold) votes[ann.label]++;
    int best_label = votes.begin()->first;
    int best_count = votes.begin()->second;
    for (const auto & [lab, cnt] : votes) {
        if (cnt > best_count) {
            best_label = lab;
            best_count = cnt;
        }
    }
    GoldAnnotation canon;
    canon.label = best_label;
    canon.rationale_mask.assign(tokens.size(), 0);
    size_t half = (gold.size() + 1) / 2;
    for (size_t i = 0; i < tokens.size(); ++i) {
        size_t marks = 0;
        for (const auto & [g, ann] : gold) {
            if (i < ann.rationale_mask.size() && ann.rationale_mask[i]) ++marks;
        }
        if (marks >= half) canon.rationale_mask[i] = 1;
    }
    canon.annotator_count = static_cast<int>(gold.size());
    return canon;
}

std::optional<CorpusFormat> corpus_format_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "hatexplain_json" || n == "hatexplain") return CorpusFormat::hatexplain_json;
    if (n == "brwrr_json" || n == "brwrr") return CorpusFormat::brwrr_json;
    return std::nullopt;
}

const std::vector<std::string> & brwrr_groups() {
    static const std::vector<std::string> groups = {"BY", "BO", "WY", "WO", "LY", "LO"};
    return groups;
}

namespace {

std::vector<Token> parse_tokens(const json & j, const std::string & id) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError("instance " + id + ": field 'tokens' must be a non-empty array");
    }
    std::vector<Token> tokens;
    tokens.reserve(j.size());
    int idx = 0;
    for (const auto & t : j) {
        if (!t.is_string() || t.get<std::string>().empty()) {
            throw ValidationError("instance " + id + ": token " + std::to_string(idx) + " must be a non-empty string");
        }
        tokens.push_back({idx, t.get<std::string>()});
        ++idx;
    }
    return tokens;
}

std::vector<uint8_t> parse_mask(const json & j, size_t token_count, const std::string & id, const std::string & field) {
    if (j.is_null()) return std::vector<uint8_t>(token_count, 0);
    if (!j.is_array()) {
        throw ValidationError("instance " + id + ": field '" + field + "' must be a 0/1 array");
    }
    if (j.size() != token_count) {
        throw ValidationError("instance " + id + ": field '" + field + "' has length " +
                              std::to_string(j.size()) + " but the instance has " +
                              std::to_string(token_count) + " tokens");
    }
    std::vector<uint8_t> mask;
    mask.reserve(j.size());
    for (const auto & v : j) {
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
            throw ValidationError("instance " + id + ": field '" + field + "' entries must be 0 or 1");
        }
        mask.push_back(static_cast<uint8_t>(v.get<int>()));
    }
    return mask;
}

Instance parse_hatexplain_line(const json & j) {
    Instance inst;
    inst.task = Task::hate3;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw ValidationError("hatexplain instance is missing string field 'id'");
    }
    inst.id = j["id"].get<std::string>();
    if (!j.contains("tokens")) throw ValidationError("instance " + inst.id + ": missing field 'tokens'");
    inst.tokens = parse_tokens(j["tokens"], inst.id);
    if (!j.contains("annotators") || !j["annotators"].is_array() || j["annotators"].empty()) {
        throw ValidationError("instance " + inst.id + ": field 'annotators' must be a non-empty array");
    }
    int ann_idx = 0;
    for (const auto & a : j["annotators"]) {
        if (!a.is_object() || !a.contains("label") || !a["label"].is_string()) {
            throw ValidationError("instance " + inst.id + ": annotator " + std::to_string(ann_idx) +
                                  " is missing string field 'label'");
        }
        auto label = normalize_label(Task::hate3, a["label"].get<std::string>());
        if (!label) {
            throw ValidationError("instance " + inst.id + ": annotator " + std::to_string(ann_idx) +
                                  " has unknown label '" + a["label"].get<std::string>() + "'");
        }
        GoldAnnotation ann;
        ann.label = *label;
        ann.rationale_mask = parse_mask(a.contains("rationale") ? a["rationale"] : json(nullptr),
                                        inst.tokens.size(), inst.id, "rationale");
        ann.annotator_count = 1;
        inst.gold.emplace("ann" + std::to_string(ann_idx), std::move(ann));
        ++ann_idx;
    }
    if (j.contains("targets")) {
        if (!j["targets"].is_array()) {
            throw ValidationError("instance " + inst.id + ": field 'targets' must be an array");
        }
        for (const auto & t : j["targets"]) {
            if (!t.is_string()) throw ValidationError("instance " + inst.id + ": targets must be strings");
            std::string tag = t.get<std::string>();
            if (!tag.empty()) inst.targets.insert(tag);
        }
    }
    return inst;
}

// Attaches the "majority" gold when >=2 of the annotator labels agree:
// majority label plus the tokens marked by at least two annotators.
void attach_majority(Instance & inst) {
    std::map<int, int> votes;
    std::vector<const GoldAnnotation *> anns;
    for (const auto & [g, ann] : inst.gold) {
        if (g.rfind("ann", 0) == 0) {
            votes[ann.label]++;
            anns.push_back(&ann);
        }
    }
    int best_label = -1;
    int best_count = 0;
    for (const auto & [lab, cnt] : votes) {
        if (cnt > best_count) {
            best_label = lab;
            best_count = cnt;
        }
    }
    if (best_count < 2) return;  // inconclusive, no majority gold
    GoldAnnotation maj;
    maj.label = best_label;
    maj.annotator_count = static_cast<int>(anns.size());
    maj.rationale_mask.assign(inst.tokens.size(), 0);
    for (size_t i = 0; i < inst.tokens.size(); ++i) {
        int marks = 0;
        for (const auto * ann : anns) {
            if (ann->rationale_mask[i]) ++marks;
        }
        if (marks >= 2) maj.rationale_mask[i] = 1;
    }
    inst.gold.emplace("majority", std::move(maj));
}

Instance parse_brwrr_line(const json & j) {
    Instance inst;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw ValidationError("brwrr instance is missing string field 'id'");
    }
    inst.id = j["id"].get<std::string>();
    if (!j.contains("task") || !j["task"].is_string()) {
        throw ValidationError("instance " + inst.id + ": missing string field 'task'");
    }
    auto task = task_from_name(j["task"].get<std::string>());
    if (!task || *task == Task::hate3) {
        throw ValidationError("instance " + inst.id + ": task must be 'cose' or 'sst'");
    }
    inst.task = *task;
    if (!j.contains("tokens")) throw ValidationError("instance " + inst.id + ": missing field 'tokens'");
    inst.tokens = parse_tokens(j["tokens"], inst.id);
    if (inst.task == Task::cose) {
        if (!j.contains("options") || !j["options"].is_array() || j["options"].size() < 2) {
            throw ValidationError("instance " + inst.id + ": cose requires an 'options' array with >=2 entries");
        }
        for (const auto & o : j["options"]) {
            if (!o.is_string()) throw ValidationError("instance " + inst.id + ": options must be strings");
            inst.options.push_back(o.get<std::string>());
        }
    }
    if (!j.contains("gold") || !j["gold"].is_object()) {
        throw ValidationError("instance " + inst.id + ": missing object field 'gold'");
    }
    for (const auto & [group, g] : j["gold"].items()) {
        if (std::find(brwrr_groups().begin(), brwrr_groups().end(), group) == brwrr_groups().end()) {
            throw ValidationError("instance " + inst.id + ": unknown gold group '" + group +
                                  "' (expected one of BY,BO,WY,WO,LY,LO)");
        }
        if (!g.is_object() || !g.contains("label")) {
            throw ValidationError("instance " + inst.id + ": gold group '" + group + "' is missing 'label'");
        }
        GoldAnnotation ann;
        if (inst.task == Task::cose) {
            if (g["label"].is_number_integer()) {
                int idx = g["label"].get<int>();
                if (idx < 0 || idx >= static_cast<int>(inst.options.size())) {
                    throw ValidationError("instance " + inst.id + ": gold group '" + group +
                                          "' label index " + std::to_string(idx) + " out of option range");
                }
                ann.label = idx;
            } else if (g["label"].is_string()) {
                auto text = g["label"].get<std::string>();
                auto it = std::find(inst.options.begin(), inst.options.end(), text);
                if (it == inst.options.end()) {
                    throw ValidationError("instance " + inst.id + ": gold group '" + group +
                                          "' label '" + text + "' is not one of the options");
                }
                ann.label = static_cast<int>(it - inst.options.begin());
            } else {
                throw ValidationError("instance " + inst.id + ": gold label must be string or index");
            }
        } else {
            if (!g["label"].is_string()) {
                throw ValidationError("instance " + inst.id + ": gold group '" + group + "' label must be a string");
            }
            auto label = normalize_label(Task::sst3, g["label"].get<std::string>());
            if (!label) {
                throw ValidationError("instance " + inst.id + ": gold group '" + group +
                                      "' has unknown label '" + g["label"].get<std::string>() + "'");
            }
            ann.label = *label;
        }
        ann.rationale_mask = parse_mask(g.contains("rationale") ? g["rationale"] : json(nullptr),
                                        inst.tokens.size(), inst.id, "gold." + group + ".rationale");
        inst.gold.emplace(group, std::move(ann));
    }
    if (inst.gold.empty()) {
        throw ValidationError("instance " + inst.id + ": gold map is empty");
    }
    return inst;
}

}  // namespace

std::vector<Instance> load_corpus(const std::string & path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<Instance> out;
    std::set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": not valid JSON");
        }
        Instance inst = (format == CorpusFormat::hatexplain_json) ? parse_hatexplain_line(j)
                                                                  : parse_brwrr_line(j);
        if (!seen_ids.insert(inst.id).second) {
            throw ValidationError("duplicate instance id '" + inst.id + "' at " + path + ":" +
                                  std::to_string(line_no));
        }
        if (format == CorpusFormat::hatexplain_json) attach_majority(inst);
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<Instance> filter_hatexplain(const std::vector<Instance> & instances) {
    std::vector<Instance> out;
    for (const auto & inst : instances) {
        if (inst.task != Task::hate3) {
            throw ValidationError("filter_hatexplain: instance " + inst.id + " is not a hate3 instance");
        }
        if (inst.gold.count("majority") == 0) continue;  // three pairwise-distinct labels
        const auto & maj = inst.gold.at("majority");
        if (maj.label != 0) {
            int rationale_bearing = 0;
            for (const auto & [g, ann] : inst.gold) {
                if (g.rfind("ann", 0) != 0) continue;
                if (std::any_of(ann.rationale_mask.begin(), ann.rationale_mask.end(),
                                [](uint8_t b) { return b != 0; })) {
                    ++rationale_bearing;
                }
            }
            if (rationale_bearing < 3) continue;
        }
        out.push_back(inst);
    }
    return out;
}

std::vector<Instance> sample_subset(const std::vector<Instance> & instances, size_t n, uint64_t seed) {
    if (n > instances.size()) {
        throw ValidationError("sample_subset: requested " + std::to_string(n) + " of " +
                              std::to_string(instances.size()) + " instances");
    }
    std::vector<size_t> idx(instances.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(splitmix64(seed));
    // Fisher-Yates prefix of length n, then restore input order.
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + bounded_index(rng(), idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    std::vector<Instance> out;
    out.reserve(n);
    for (size_t i : idx) out.push_back(instances[i]);
    return out;
}

namespace {

std::optional<std::string> subgroup_for_tag(std::string_view tag) {
    std::string t = to_lower(tag);
    static const std::set<std::string> gender = {"women", "men", "woman", "man", "gender"};
    static const std::set<std::string> race = {"african", "arab", "asian", "caucasian", "hispanic",
                                               "indian", "indigenous", "race", "ethnicity"};
    static const std::set<std::string> religion = {"islam", "muslim", "christian", "jewish", "hindu",
                                                   "buddhism", "buddhist", "religion"};
    if (gender.count(t)) return std::string(kSliceGender);
    if (race.count(t)) return std::string(kSliceRace);
    if (religion.count(t)) return std::string(kSliceReligion);
    return std::nullopt;
}

}  // namespace

std::map<std::string, std::vector<Instance>> slice_by_target(const std::vector<Instance> & instances) {
    std::map<std::string, std::vector<Instance>> slices;
    slices[kSliceGender];
    slices[kSliceRace];
    slices[kSliceReligion];
    slices[kSliceNoTarget];
    for (const auto & inst : instances) {
        if (inst.task != Task::hate3) {
            throw ValidationError("slice_by_target: instance " + inst.id + " is not a hate3 instance");
        }
        std::set<std::string> hit;
        for (const auto & tag : inst.targets) {
            if (auto sub = subgroup_for_tag(tag)) hit.insert(*sub);
        }
        if (hit.empty()) {
            slices[kSliceNoTarget].push_back(inst);
        } else {
            for (const auto & sub : hit) slices[sub].push_back(inst);
        }
    }
    return slices;
}

std::string corpus_file_digest(const std::string & path) {
    return digest_hex(read_text_file(path));
}

}  // namespace ppaudit
