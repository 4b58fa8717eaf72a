#pragma once

#include "ppaudit/corpus.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppaudit {

enum class ParseStatus { ok, repaired, failed };

std::string parse_status_name(ParseStatus s);
std::optional<ParseStatus> parse_status_from_name(std::string_view name);

struct ParsedResponse {
    ParseStatus status = ParseStatus::failed;
    std::string failure_reason;            // set only when status == failed
    std::optional<int> label;              // task label index (option index for cose)
    std::optional<int> answer_index;       // cose only
    std::vector<std::string> rationale_words;
    std::string reasoning_text;            // think-block or "reasoning" field content
};

// Extracts the last well-formed JSON object outside <think> tags, walking a
// repair ladder (code fences, trailing commas, single quotes) before giving
// up. Labels are normalized case-insensitively through the task alias
// table. Never throws: arbitrary bytes yield status failed with a reason.
ParsedResponse parse_completion(std::string_view text, Task task,
                                const std::vector<std::string> & options = {});

// cose resolution: the verbatim answer text wins when it matches an option
// exactly; otherwise the index wins when in range; otherwise failed.
ParsedResponse parse_cose(std::string_view text, const std::vector<std::string> & options);

// Projects rationale word lists onto a binary token mask. Entries are
// whitespace-split, then words and tokens are normalized (ASCII casefold,
// leading/trailing punctuation stripped); every matching token is marked.
// Unmatched words are appended to *unmatched when given.
std::vector<uint8_t> project_mask(const std::vector<std::string> & rationale_words,
                                  const std::vector<Token> & tokens,
                                  std::vector<std::string> * unmatched = nullptr);

struct AnnotationRecord {
    std::string instance_id;
    std::string persona_id;
    int run = 1;
    std::string model_name;
    std::optional<int> label;
    std::vector<uint8_t> rationale_mask;   // length = instance token count
    std::string reasoning_text;
    ParseStatus parse_status = ParseStatus::failed;
    std::string failure_reason;
};

// Builds the record for one completion: parse, then project the rationale
// onto the instance tokens. Failed parses keep an all-zero mask.
AnnotationRecord make_record(std::string_view completion_text, const Instance & instance,
                             const std::string & persona_id, int run,
                             const std::string & model_name);

// JSONL persistence, one record per line.
void write_records(const std::string & path, const std::vector<AnnotationRecord> & records);
std::vector<AnnotationRecord> read_records(const std::string & path);

}  // namespace ppaudit
