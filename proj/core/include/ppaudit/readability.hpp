#pragma once

#include "ppaudit/parsing.hpp"
#include "ppaudit/personas.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppaudit {

struct TextProfile {
    int word_count = 0;
    int sentence_count = 0;
    int syllable_count = 0;
    double flesch = 0.0;  // 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words)
};

// Words are whitespace-delimited units containing at least one letter;
// sentences are maximal segments ending in . ! ? (whole text counts as one
// sentence when none appear); syllables use the vowel-group heuristic with
// silent trailing 'e' handling and a minimum of one per word. Returns
// nullopt when the text contains no words.
std::optional<TextProfile> profile(std::string_view text);

// Syllables for a single word, exposed for tests.
int count_syllables(std::string_view word);

struct LinguisticsRow {
    std::string persona_id;
    std::string model_name;
    double avg_word_count = 0.0;
    double avg_flesch = 0.0;
    int record_count = 0;
};

// Averages over parsed records with non-empty reasoning text, one row per
// (persona, model) with at least one profiled record.
std::vector<LinguisticsRow> profile_by_persona(const std::vector<AnnotationRecord> & records);

}  // namespace ppaudit
