#include "ppaudit/parsing.hpp"

#include "ppaudit/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>

using nlohmann::json;

namespace ppaudit {

std::string parse_status_name(ParseStatus s) {
    switch (s) {
        case ParseStatus::ok: return "ok";
        case ParseStatus::repaired: return "repaired";
        case ParseStatus::failed: return "failed";
    }
    return "?";
}

std::optional<ParseStatus> parse_status_from_name(std::string_view name) {
    if (name == "ok") return ParseStatus::ok;
    if (name == "repaired") return ParseStatus::repaired;
    if (name == "failed") return ParseStatus::failed;
    return std::nullopt;
}

namespace {

struct ThinkSplit {
    std::string outside;    // text with <think>...</think> spans removed
    std::string last_block; // content of the final think pair (or unclosed tail)
    bool unclosed = false;
};

ThinkSplit split_think(std::string_view text) {
    static const std::string open_tag = "<think>";
    static const std::string close_tag = "</think>";
    ThinkSplit out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t open = text.find(open_tag, pos);
        if (open == std::string_view::npos) {
            out.outside.append(text.substr(pos));
            break;
        }
        out.outside.append(text.substr(pos, open - pos));
        size_t body = open + open_tag.size();
        size_t close = text.find(close_tag, body);
        if (close == std::string_view::npos) {
            out.last_block = std::string(text.substr(body));
            out.unclosed = true;
            break;
        }
        out.last_block = std::string(text.substr(body, close - body));
        pos = close + close_tag.size();
    }
    return out;
}

// Top-level balanced {...} spans, string-aware. Unterminated spans are
// ignored.
std::vector<std::pair<size_t, size_t>> object_spans(std::string_view text) {
    std::vector<std::pair<size_t, size_t>> spans;
    int depth = 0;
    size_t start = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            if (depth > 0) in_string = true;
            continue;
        }
        if (c == '{') {
            if (depth == 0) start = i;
            ++depth;
        } else if (c == '}') {
            if (depth > 0) {
                --depth;
                if (depth == 0) spans.emplace_back(start, i + 1);
            }
        }
    }
    return spans;
}

std::string strip_code_fences(std::string_view s) {
    std::string out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t tick = s.find("```", pos);
        if (tick == std::string_view::npos) {
            out.append(s.substr(pos));
            break;
        }
        out.append(s.substr(pos, tick - pos));
        size_t nl = s.find('\n', tick);
        // drop the fence marker and any language tag on the same line
        size_t line_end = s.find_first_of("\r\n", tick + 3);
        if (nl == std::string_view::npos && line_end == std::string_view::npos) {
            pos = tick + 3;
        } else {
            pos = std::min(nl == std::string_view::npos ? s.size() : nl,
                           line_end == std::string_view::npos ? s.size() : line_end);
        }
    }
    return out;
}

std::string drop_trailing_commas(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_string = false;
    bool escaped = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            out += c;
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
            out += c;
            continue;
        }
        if (c == ',') {
            size_t j = i + 1;
            while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;  // drop it
        }
        out += c;
    }
    return out;
}

std::string single_to_double_quotes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_dquote = false;
    bool escaped = false;
    for (char c : s) {
        if (in_dquote) {
            out += c;
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_dquote = false;
            continue;
        }
        if (c == '"') {
            in_dquote = true;
            out += c;
        } else if (c == '\'') {
            out += '"';
        } else {
            out += c;
        }
    }
    return out;
}

json try_parse(std::string_view s) {
    return json::parse(s, nullptr, false);
}

struct Extracted {
    json payload;
    bool repaired = false;
    bool found = false;
};

Extracted extract_json(std::string_view searchable) {
    Extracted result;
    auto spans = object_spans(searchable);
    for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
        std::string_view candidate = searchable.substr(it->first, it->second - it->first);
        json j = try_parse(candidate);
        if (!j.is_discarded() && j.is_object()) {
            result.payload = std::move(j);
            result.found = true;
            return result;
        }
        for (const auto & fix : {drop_trailing_commas(candidate),
                                 single_to_double_quotes(candidate),
                                 drop_trailing_commas(single_to_double_quotes(candidate))}) {
            j = try_parse(fix);
            if (!j.is_discarded() && j.is_object()) {
                result.payload = std::move(j);
                result.found = true;
                result.repaired = true;
                return result;
            }
        }
    }
    return result;
}

std::vector<std::string> collect_rationale(const json & j) {
    std::vector<std::string> out;
    if (!j.contains("rationale")) return out;
    const json & r = j["rationale"];
    if (r.is_string()) {
        out.push_back(r.get<std::string>());
    } else if (r.is_array()) {
        for (const auto & w : r) {
            if (w.is_string()) out.push_back(w.get<std::string>());
            else if (w.is_number()) out.push_back(w.dump());
        }
    }
    return out;
}

ParsedResponse failed(std::string reason, std::string reasoning) {
    ParsedResponse out;
    out.status = ParseStatus::failed;
    out.failure_reason = std::move(reason);
    out.reasoning_text = std::move(reasoning);
    return out;
}

}  // namespace

ParsedResponse parse_completion(std::string_view text, Task task,
                                const std::vector<std::string> & options) {
    if (task == Task::cose) return parse_cose(text, options);

    ThinkSplit think = split_think(text);
    Extracted ex = extract_json(think.outside);
    bool fence_repair = false;
    if (!ex.found) {
        std::string defenced = strip_code_fences(think.outside);
        if (defenced != think.outside) {
            ex = extract_json(defenced);
            fence_repair = ex.found;
        }
    }
    if (!ex.found && think.unclosed) {
        // Some models forget the closing tag and still emit the payload; look
        // inside the dangling block before giving up.
        ex = extract_json(think.last_block);
        if (ex.found) ex.repaired = true;
    }
    if (!ex.found) return failed("no_json", think.last_block);

    ParsedResponse out;
    out.status = (ex.repaired || fence_repair) ? ParseStatus::repaired : ParseStatus::ok;
    out.reasoning_text = think.last_block;
    if (out.reasoning_text.empty() && ex.payload.contains("reasoning") &&
        ex.payload["reasoning"].is_string()) {
        out.reasoning_text = ex.payload["reasoning"].get<std::string>();
    }
    out.rationale_words = collect_rationale(ex.payload);

    if (!ex.payload.contains("label") || !ex.payload["label"].is_string()) {
        return failed("missing_label", out.reasoning_text);
    }
    auto label = normalize_label(task, ex.payload["label"].get<std::string>());
    if (!label) {
        return failed("bad_label:" + ex.payload["label"].get<std::string>(), out.reasoning_text);
    }
    out.label = *label;
    return out;
}

ParsedResponse parse_cose(std::string_view text, const std::vector<std::string> & options) {
    ThinkSplit think = split_think(text);
    Extracted ex = extract_json(think.outside);
    bool fence_repair = false;
    if (!ex.found) {
        std::string defenced = strip_code_fences(think.outside);
        if (defenced != think.outside) {
            ex = extract_json(defenced);
            fence_repair = ex.found;
        }
    }
    if (!ex.found && think.unclosed) {
        ex = extract_json(think.last_block);
        if (ex.found) ex.repaired = true;
    }
    if (!ex.found) return failed("no_json", think.last_block);

    ParsedResponse out;
    out.status = (ex.repaired || fence_repair) ? ParseStatus::repaired : ParseStatus::ok;
    out.reasoning_text = think.last_block;
    if (out.reasoning_text.empty() && ex.payload.contains("reasoning") &&
        ex.payload["reasoning"].is_string()) {
        out.reasoning_text = ex.payload["reasoning"].get<std::string>();
    }
    out.rationale_words = collect_rationale(ex.payload);

    std::optional<int> text_index;
    if (ex.payload.contains("answer") && ex.payload["answer"].is_string()) {
        auto answer = ex.payload["answer"].get<std::string>();
        auto it = std::find(options.begin(), options.end(), answer);
        if (it != options.end()) text_index = static_cast<int>(it - options.begin());
    }
    std::optional<int> field_index;
    if (ex.payload.contains("answer_index")) {
        const json & idx = ex.payload["answer_index"];
        if (idx.is_number_integer()) {
            int v = idx.get<int>();
            if (v >= 0 && v < static_cast<int>(options.size())) field_index = v;
        } else if (idx.is_string()) {
            // tolerate quoted indices
            try {
                int v = std::stoi(idx.get<std::string>());
                if (v >= 0 && v < static_cast<int>(options.size())) field_index = v;
            } catch (...) {
            }
        }
    }

    if (text_index) {
        if (!field_index || *field_index != *text_index) out.status = ParseStatus::repaired;
        out.answer_index = *text_index;
    } else if (field_index) {
        if (ex.payload.contains("answer")) out.status = ParseStatus::repaired;
        out.answer_index = *field_index;
    } else {
        return failed("answer_unresolvable", out.reasoning_text);
    }
    out.label = out.answer_index;
    return out;
}

namespace {

std::string normalize_word(std::string_view w) {
    size_t b = 0;
    size_t e = w.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
    std::string out;
    out.reserve(e - b);
    for (size_t i = b; i < e; ++i) {
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(w[i])));
    }
    return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

}  // namespace

std::vector<uint8_t> project_mask(const std::vector<std::string> & rationale_words,
                                  const std::vector<Token> & tokens,
                                  std::vector<std::string> * unmatched) {
    std::vector<std::string> token_norms;
    token_norms.reserve(tokens.size());
    for (const auto & t : tokens) token_norms.push_back(normalize_word(t.surface));

    std::vector<uint8_t> mask(tokens.size(), 0);
    for (const auto & entry : rationale_words) {
        for (const auto & piece : split_whitespace(entry)) {
            std::string norm = normalize_word(piece);
            if (norm.empty()) continue;
            bool hit = false;
            for (size_t i = 0; i < token_norms.size(); ++i) {
                if (token_norms[i] == norm) {
                    mask[i] = 1;
                    hit = true;
                }
            }
            if (!hit && unmatched) unmatched->push_back(piece);
        }
    }
    return mask;
}

AnnotationRecord make_record(std::string_view completion_text, const Instance & instance,
                             const std::string & persona_id, int run,
                             const std::string & model_name) {
    AnnotationRecord rec;
    rec.instance_id = instance.id;
    rec.persona_id = persona_id;
    rec.run = run;
    rec.model_name = model_name;
    ParsedResponse parsed = parse_completion(completion_text, instance.task, instance.options);
    rec.parse_status = parsed.status;
    rec.failure_reason = parsed.failure_reason;
    rec.label = parsed.label;
    rec.reasoning_text = parsed.reasoning_text;
    if (parsed.status != ParseStatus::failed) {
        rec.rationale_mask = project_mask(parsed.rationale_words, instance.tokens);
    } else {
        rec.rationale_mask.assign(instance.tokens.size(), 0);
    }
    return rec;
}

void write_records(const std::string & path, const std::vector<AnnotationRecord> & records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open records file for writing: " + path);
    for (const auto & rec : records) {
        json j;
        j["instance_id"] = rec.instance_id;
        j["persona_id"] = rec.persona_id;
        j["run"] = rec.run;
        j["model"] = rec.model_name;
        if (rec.label) j["label"] = *rec.label;
        else j["label"] = nullptr;
        j["mask"] = rec.rationale_mask;
        j["reasoning"] = rec.reasoning_text;
        j["status"] = parse_status_name(rec.parse_status);
        if (!rec.failure_reason.empty()) j["reason"] = rec.failure_reason;
        // reasoning text can carry arbitrary bytes from unparseable
        // completions; replace invalid sequences instead of throwing
        out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
}

std::vector<AnnotationRecord> read_records(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open records file: " + path);
    std::vector<AnnotationRecord> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": not a JSON record");
        }
        AnnotationRecord rec;
        rec.instance_id = j.value("instance_id", "");
        rec.persona_id = j.value("persona_id", "");
        rec.run = j.value("run", 1);
        rec.model_name = j.value("model", "");
        if (j.contains("label") && j["label"].is_number_integer()) rec.label = j["label"].get<int>();
        if (j.contains("mask") && j["mask"].is_array()) {
            for (const auto & b : j["mask"]) rec.rationale_mask.push_back(b.get<int>() ? 1 : 0);
        }
        rec.reasoning_text = j.value("reasoning", "");
        auto status = parse_status_from_name(j.value("status", "failed"));
        rec.parse_status = status.value_or(ParseStatus::failed);
        rec.failure_reason = j.value("reason", "");
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace ppaudit
