#include "ppaudit/personas.hpp"

#include "ppaudit/util.hpp"

#include <json.hpp>

#include <array>

using nlohmann::json;

namespace ppaudit {

std::string persona_kind_name(PersonaKind k) {
    switch (k) {
        case PersonaKind::baseline: return "baseline";
        case PersonaKind::single: return "single";
        case PersonaKind::composite: return "composite";
    }
    return "?";
}

const std::vector<std::string> & attribute_categories() {
    static const std::vector<std::string> cats = {
        "age", "education", "gender", "loneliness", "political_view", "race", "religion"};
    return cats;
}

const std::vector<std::string> & attribute_values(std::string_view category) {
    static const std::map<std::string, std::vector<std::string>, std::less<>> values = {
        {"age", {"15", "35", "65"}},
        {"education", {"No formal education", "High school education", "Higher education"}},
        {"gender", {"Male", "Female"}},
        {"loneliness", {"Not lonely", "Somewhat lonely"}},
        {"political_view", {"Left-wing", "Right-wing", "Centrist"}},
        {"race", {"White", "Black", "Asian"}},
        {"religion", {"Christian", "Muslim", "Jewish", "Atheist", "Hindu"}},
    };
    auto it = values.find(category);
    if (it == values.end()) throw ValidationError("unknown attribute category: " + std::string(category));
    return it->second;
}

namespace {

struct SinglePhrase {
    const char * category;
    const char * value;
    const char * slug;
    const char * phrase;
};

// Committed phrase table for the 21 single-attribute personas. The values
// come from the attribute lists above; the phrasing is a fixed convention
// of this registry and is pinned by snapshot tests.
constexpr std::array<SinglePhrase, 21> kSinglePhrases = {{
    {"age", "15", "age_15", "is 15 years old"},
    {"age", "35", "age_35", "is 35 years old"},
    {"age", "65", "age_65", "is 65 years old"},
    {"education", "No formal education", "education_no_formal", "has no formal education"},
    {"education", "High school education", "education_high_school", "has a high school education"},
    {"education", "Higher education", "education_higher", "has a higher education"},
    {"gender", "Male", "gender_male", "is male"},
    {"gender", "Female", "gender_female", "is female"},
    {"loneliness", "Not lonely", "loneliness_not_lonely", "is not lonely"},
    {"loneliness", "Somewhat lonely", "loneliness_somewhat_lonely", "is somewhat lonely"},
    {"political_view", "Left-wing", "political_left_wing", "identifies as left-wing"},
    {"political_view", "Right-wing", "political_right_wing", "identifies as right-wing"},
    {"political_view", "Centrist", "political_centrist", "identifies as centrist"},
    {"race", "White", "race_white", "is White"},
    {"race", "Black", "race_black", "is Black"},
    {"race", "Asian", "race_asian", "is Asian"},
    {"religion", "Christian", "religion_christian", "is a Christian"},
    {"religion", "Muslim", "religion_muslim", "is a Muslim"},
    {"religion", "Jewish", "religion_jewish", "is Jewish"},
    {"religion", "Atheist", "religion_atheist", "is an atheist"},
    {"religion", "Hindu", "religion_hindu", "is a Hindu"},
}};

struct CompositeAxis {
    const char * code;
    const char * value;
};

constexpr std::array<CompositeAxis, 3> kEthnicities = {{
    {"B", "African American"},
    {"L", "Hispanic"},
    {"W", "Caucasian"},
}};
constexpr std::array<CompositeAxis, 2> kAges = {{
    {"Y", "25"},
    {"O", "45"},
}};
constexpr std::array<CompositeAxis, 2> kGenders = {{
    {"M", "Male"},
    {"F", "Female"},
}};

std::vector<Persona> build_registry() {
    std::vector<Persona> out;
    Persona baseline;
    baseline.id = "baseline";
    baseline.kind = PersonaKind::baseline;
    baseline.description = "";
    out.push_back(std::move(baseline));

    for (const auto & p : kSinglePhrases) {
        Persona persona;
        persona.id = p.slug;
        persona.kind = PersonaKind::single;
        persona.attributes[p.category] = p.value;
        persona.description = p.phrase;
        out.push_back(std::move(persona));
    }

    // Ids follow the BRWRR-style letter codes: ethnicity, age, gender
    // (e.g. BYM = African American, 25, Male).
    for (const auto & eth : kEthnicities) {
        for (const auto & age : kAges) {
            for (const auto & gen : kGenders) {
                Persona persona;
                persona.id = std::string(eth.code) + age.code + gen.code;
                persona.kind = PersonaKind::composite;
                persona.attributes["age"] = age.value;
                persona.attributes["gender"] = gen.value;
                persona.attributes["ethnicity"] = eth.value;
                persona.description = "is a " + std::string(age.value) + "-year-old " + eth.value +
                                      " " + to_lower(gen.value);
                out.push_back(std::move(persona));
            }
        }
    }
    return out;
}

}  // namespace

const std::vector<Persona> & registry() {
    static const std::vector<Persona> reg = build_registry();
    return reg;
}

const Persona * find_persona(std::string_view id) {
    for (const auto & p : registry()) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

std::string describe(const Persona & persona) {
    return persona.description;
}

std::optional<std::string> group_of(const Persona & persona) {
    if (persona.kind != PersonaKind::single) return std::nullopt;
    return persona.attributes.begin()->first;
}

std::string registry_json() {
    json arr = json::array();
    for (const auto & p : registry()) {
        json j;
        j["id"] = p.id;
        j["kind"] = persona_kind_name(p.kind);
        j["attributes"] = p.attributes;
        j["description"] = p.description;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string registry_version() {
    return digest_hex(registry_json());
}

}  // namespace ppaudit
