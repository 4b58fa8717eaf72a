#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ppaudit/personas.hpp"

#include <map>
#include <set>

using namespace ppaudit;

TEST_CASE("registry cardinalities") {
    const auto & reg = registry();
    CHECK(reg.size() == 34);  // 1 baseline + 21 single + 12 composite

    std::map<PersonaKind, int> kinds;
    std::map<std::string, int> categories;
    for (const auto & p : reg) {
        kinds[p.kind]++;
        if (auto g = group_of(p)) categories[*g]++;
    }
    CHECK(kinds[PersonaKind::baseline] == 1);
    CHECK(kinds[PersonaKind::single] == 21);
    CHECK(kinds[PersonaKind::composite] == 12);

    CHECK(categories["age"] == 3);
    CHECK(categories["education"] == 3);
    CHECK(categories["gender"] == 2);
    CHECK(categories["loneliness"] == 2);
    CHECK(categories["political_view"] == 3);
    CHECK(categories["race"] == 3);
    CHECK(categories["religion"] == 5);
}

TEST_CASE("ids are unique") {
    std::set<std::string> ids;
    for (const auto & p : registry()) CHECK(ids.insert(p.id).second);
}

TEST_CASE("composite grid covers 2 ages x 2 genders x 3 ethnicities") {
    std::set<std::tuple<std::string, std::string, std::string>> combos;
    bool found_25_female_hispanic = false;
    for (const auto & p : registry()) {
        if (p.kind != PersonaKind::composite) continue;
        auto age = p.attributes.at("age");
        auto gender = p.attributes.at("gender");
        auto eth = p.attributes.at("ethnicity");
        combos.insert({age, gender, eth});
        if (age == "25" && gender == "Female" && eth == "Hispanic") found_25_female_hispanic = true;
        CHECK(p.attributes.size() == 3);
    }
    CHECK(combos.size() == 12);
    CHECK(found_25_female_hispanic);
}

TEST_CASE("single personas have exactly one attribute") {
    for (const auto & p : registry()) {
        if (p.kind == PersonaKind::single) CHECK(p.attributes.size() == 1);
        if (p.kind == PersonaKind::baseline) CHECK(p.attributes.empty());
    }
}

TEST_CASE("phrase table snapshot") {
    CHECK(describe(*find_persona("baseline")).empty());
    CHECK(describe(*find_persona("age_65")) == "is 65 years old");
    CHECK(describe(*find_persona("education_no_formal")) == "has no formal education");
    CHECK(describe(*find_persona("political_left_wing")) == "identifies as left-wing");
    CHECK(describe(*find_persona("religion_atheist")) == "is an atheist");
    CHECK(describe(*find_persona("gender_female")) == "is female");
    CHECK(describe(*find_persona("loneliness_somewhat_lonely")) == "is somewhat lonely");
    CHECK(describe(*find_persona("race_white")) == "is White");
    CHECK(describe(*find_persona("WYM")) == "is a 25-year-old Caucasian male");
    CHECK(describe(*find_persona("BOF")) == "is a 45-year-old African American female");
    CHECK(describe(*find_persona("LYF")) == "is a 25-year-old Hispanic female");
}

TEST_CASE("describe is injective over the registry") {
    std::set<std::string> seen;
    for (const auto & p : registry()) {
        if (p.kind == PersonaKind::baseline) continue;
        CHECK(seen.insert(describe(p)).second);
    }
}

TEST_CASE("group_of maps singles only") {
    CHECK(group_of(*find_persona("religion_muslim")) == std::optional<std::string>("religion"));
    CHECK(!group_of(*find_persona("baseline")).has_value());
    CHECK(!group_of(*find_persona("BYM")).has_value());
}

TEST_CASE("attribute values match the published table") {
    CHECK(attribute_values("age") == std::vector<std::string>{"15", "35", "65"});
    CHECK(attribute_values("religion") ==
          std::vector<std::string>{"Christian", "Muslim", "Jewish", "Atheist", "Hindu"});
    CHECK(attribute_values("political_view") ==
          std::vector<std::string>{"Left-wing", "Right-wing", "Centrist"});
    CHECK(attribute_values("loneliness") == std::vector<std::string>{"Not lonely", "Somewhat lonely"});
}

TEST_CASE("registry json is stable") {
    CHECK(registry_json().find("\"id\": \"WYM\"") != std::string::npos);
    CHECK(registry_version() == registry_version());
    CHECK(find_persona("nope") == nullptr);
}
