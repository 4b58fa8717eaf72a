#pragma once

#include "ppaudit/corpus.hpp"
#include "ppaudit/personas.hpp"

#include <map>
#include <string>
#include <vector>

namespace ppaudit {

enum class PromptVariant { cot, no_cot };

std::string prompt_variant_name(PromptVariant v);
std::optional<PromptVariant> prompt_variant_from_name(std::string_view name);

struct PromptSpec {
    Task task = Task::hate3;
    Persona persona;
    PromptVariant variant = PromptVariant::cot;
    // Providers without <think>-tag support get an explicit "reasoning"
    // key added to the output schema instead.
    bool reasoning_field = false;
};

struct RenderedPrompt {
    std::string text;
    std::vector<std::string> schema;  // expected JSON keys in the reply
};

// Raw template text for one (task, kind) pair, with {{...}} placeholders.
// Exposed for snapshot tests and manifest hashing.
const std::string & prompt_template(Task task, PersonaKind kind);
std::map<std::string, std::string> template_hashes();

// Substitutes persona description, input text and options into the template
// for spec.task. The no_cot variant drops only the think-step instruction;
// reasoning_field adds the "reasoning" key to the JSON format block. All
// other bytes are template-identical. Throws ValidationError when
// spec.task != instance.task.
RenderedPrompt render(const PromptSpec & spec, const Instance & instance);

struct WorkItem {
    std::string key;  // "<instance_id>|<persona_id>|r<run>", stable across re-runs
    std::string instance_id;
    std::string persona_id;
    int run = 1;
};

// Cartesian product instance x persona x run in instance-major order.
std::vector<WorkItem> plan_run(const std::vector<Instance> & instances,
                               const std::vector<Persona> & personas,
                               int runs);

}  // namespace ppaudit
