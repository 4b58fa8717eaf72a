#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppaudit {

enum class PersonaKind { baseline, single, composite };

std::string persona_kind_name(PersonaKind k);

struct Persona {
    std::string id;
    PersonaKind kind = PersonaKind::baseline;
    std::map<std::string, std::string> attributes;  // category -> value
    std::string description;                        // rendered English phrase
};

// Attribute categories for single-attribute personas, fixed order.
const std::vector<std::string> & attribute_categories();
// Closed value list for one category.
const std::vector<std::string> & attribute_values(std::string_view category);

// The full closed registry: 1 baseline + 21 single-attribute personas across
// seven categories + 12 composite (2 ages x 2 genders x 3 ethnicities).
const std::vector<Persona> & registry();

const Persona * find_persona(std::string_view id);

// The committed English phrase for a persona, e.g. "is 65 years old",
// "has no formal education", "is a 25-year-old Caucasian male". Baseline
// renders as the empty string. Deterministic; snapshot-tested.
std::string describe(const Persona & persona);

// Attribute group for agreement tables: single personas map to their
// category, baseline and composite personas to nullopt.
std::optional<std::string> group_of(const Persona & persona);

// Registry serialized as a JSON array (used by `audit personas list` and as
// the registry version digest input).
std::string registry_json();
std::string registry_version();

}  // namespace ppaudit
