#include "ppaudit/readability.hpp"

#include <cctype>
#include <map>

namespace ppaudit {

namespace {

bool is_vowel(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
            return true;
        default:
            return false;
    }
}

bool has_alpha(std::string_view w) {
    for (char c : w) {
        if (std::isalpha(static_cast<unsigned char>(c))) return true;
    }
    return false;
}

}  // namespace

int count_syllables(std::string_view word) {
    std::string letters;
    for (char c : word) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            letters += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    if (letters.empty()) return 1;

    int groups = 0;
    bool prev_vowel = false;
    for (char c : letters) {
        bool v = is_vowel(c);
        if (v && !prev_vowel) ++groups;
        prev_vowel = v;
    }
    // trailing silent 'e' unless it carries the only vowel group
    if (groups > 1 && letters.back() == 'e' && letters.size() >= 2 &&
        !is_vowel(letters[letters.size() - 2])) {
        --groups;
    }
    return groups < 1 ? 1 : groups;
}

std::optional<TextProfile> profile(std::string_view text) {
    TextProfile p;
    size_t i = 0;
    int words_in_segment = 0;
    int segments_with_words = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            if (words_in_segment > 0) ++segments_with_words;
            words_in_segment = 0;
            while (i < text.size() && (text[i] == '.' || text[i] == '!' || text[i] == '?')) ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               text[i] != '.' && text[i] != '!' && text[i] != '?') {
            ++i;
        }
        std::string_view unit = text.substr(start, i - start);
        if (has_alpha(unit)) {
            ++p.word_count;
            ++words_in_segment;
            p.syllable_count += count_syllables(unit);
        }
    }
    if (words_in_segment > 0) ++segments_with_words;

    if (p.word_count == 0) return std::nullopt;
    p.sentence_count = segments_with_words > 0 ? segments_with_words : 1;
    double wps = static_cast<double>(p.word_count) / static_cast<double>(p.sentence_count);
    double spw = static_cast<double>(p.syllable_count) / static_cast<double>(p.word_count);
    p.flesch = 206.835 - 1.015 * wps - 84.6 * spw;
    return p;
}

std::vector<LinguisticsRow> profile_by_persona(const std::vector<AnnotationRecord> & records) {
    struct Acc {
        double words = 0.0;
        double flesch = 0.0;
        int count = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto & r : records) {
        if (r.parse_status == ParseStatus::failed || r.reasoning_text.empty()) continue;
        auto p = profile(r.reasoning_text);
        if (!p) continue;
        Acc & a = acc[{r.persona_id, r.model_name}];
        a.words += p->word_count;
        a.flesch += p->flesch;
        a.count += 1;
    }
    std::vector<LinguisticsRow> out;
    for (const auto & [key, a] : acc) {
        LinguisticsRow row;
        row.persona_id = key.first;
        row.model_name = key.second;
        row.avg_word_count = a.words / a.count;
        row.avg_flesch = a.flesch / a.count;
        row.record_count = a.count;
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace ppaudit
