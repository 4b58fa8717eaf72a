#include "ppaudit/prompting.hpp"

#include "ppaudit/util.hpp"

namespace ppaudit {

std::string prompt_variant_name(PromptVariant v) {
    return v == PromptVariant::cot ? "cot" : "no_cot";
}

std::optional<PromptVariant> prompt_variant_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "cot") return PromptVariant::cot;
    if (n == "no-cot" || n == "no_cot" || n == "nocot") return PromptVariant::no_cot;
    return std::nullopt;
}

namespace {

// Think-step instructions; removed verbatim for the no_cot variant.
const std::string kThinkHateBaseline =
    "First, think step by step, explaining your reasoning inside <think>...</think> tags.\n\n";
const std::string kThinkBaseline =
    "First, think step by step inside <think>...</think> tags.\n\n";
const std::string kThinkPersona =
    "First, think out loud as this persona, step by step, inside <think>...</think> tags. "
    "Reflect honestly about how this person's perspective influences what they notice and how "
    "they judge the text.\n\n";

const std::string kHateBaseline =
    "Given the following text post, classify it into one of the available categories:\n"
    "\n"
    "Available categories: Hate speech, Offensive language, Normal\n"
    "\n"
    "{{think_instruction}}"
    "Then, respond with a JSON object in this format (and no other text):\n"
    "\n"
    "{\n"
    "  \"label\": \"<one of the above categories>\",\n"
    "  \"rationale\": [\"word1\", \"word2\", \"...\"]{{reasoning_line}}\n"
    "}\n"
    "\n"
    "Input:\n"
    "{{input_text}}\n";

const std::string kHatePersona =
    "Step into the shoes of a real person who {{persona_description}}.\n"
    "\n"
    "Imagine you have lived your whole life shaped by this trait. How might it affect your "
    "thoughts, emotions, sensitivities, and judgments?\n"
    "\n"
    "Given the following text post, analyze and classify it exactly as this person "
    "would—letting their background, beliefs, and life experiences guide your reasoning.\n"
    "\n"
    "Available categories for classification:\n"
    "Hate speech, Offensive language, Normal\n"
    "\n"
    "{{think_instruction}}"
    "Then, respond only with a JSON object in this format (and no other text):\n"
    "\n"
    "{\n"
    "  \"label\": \"<one of the above categories>\",\n"
    "  \"rationale\": [\"word1\", \"word2\", \"...\"]{{reasoning_line}}\n"
    "}\n"
    "\n"
    "- Stay fully in character; do not break persona or add explanations outside the JSON.\n"
    "\n"
    "Input:\n"
    "{{input_text}}\n";

const std::string kCoseBaseline =
    "Task: first select the answer you think is most correct and sensible; then mark relevant "
    "words in the question that justify your choice.\n"
    "\n"
    "{{think_instruction}}"
    "Then, respond only with a JSON object in this format (and no other text):\n"
    "\n"
    "{\n"
    "  \"answer\": \"<exact option text>\",\n"
    "  \"answer_index\": <0-based index>,\n"
    "  \"rationale\": [\"keyword1\", \"keyword2\"]{{reasoning_line}}\n"
    "}\n"
    "\n"
    "Question:\n"
    "{{input_text}}\n"
    "\n"
    "Options:\n"
    "{{options}}\n"
    "\n"
    "Rules:\n"
    "- The value for \"answer\" must be copied verbatim from the options list.\n"
    "- \"answer_index\" must match the position (0-based) in the options list.\n"
    "- For each word in the question, if removing it would lower your confidence in the chosen "
    "label, include it in \"rationale\".\n";

const std::string kCosePersona =
    "Step into the shoes of a real person who {{persona_description}}.\n"
    "\n"
    "Imagine you have lived your whole life shaped by this trait. How might it affect your "
    "thoughts, emotions, sensitivities, and judgments?\n"
    "\n"
    "Task: first select the answer you think is most correct and sensible; then mark relevant "
    "words in the question that justify your choice.\n"
    "\n"
    "{{think_instruction}}"
    "Answer it exactly as this person would—letting their background, beliefs, and life "
    "experiences guide your reasoning.\n"
    "\n"
    "Then, respond only with a JSON object in this format (and no other text):\n"
    "\n"
    "{\n"
    "  \"answer\": \"<exact option text>\",\n"
    "  \"answer_index\": <0-based index>,\n"
    "  \"rationale\": [\"keyword1\", \"keyword2\"]{{reasoning_line}}\n"
    "}\n"
    "\n"
    "Question:\n"
    "{{input_text}}\n"
    "\n"
    "Options:\n"
    "{{options}}\n"
    "\n"
    "Rules:\n"
    "- The value for \"answer\" must be copied verbatim from the options list.\n"
    "- \"answer_index\" must match the position (0-based) in the options list.\n"
    "- For each word in the question, if removing it would lower your confidence in the chosen "
    "label, include it in \"rationale\".\n"
    "- Stay fully in character; do not break persona or add explanations outside the JSON.\n";

const std::string kSstBaseline =
    "Task: read the following sentence and choose exactly one of three labels.\n"
    "\n"
    "Positive: The sentence conveys information about the author’s positive evaluative "
    "sentiment.\n"
    "\n"
    "Negative: The sentence conveys information about the author’s negative evaluative "
    "sentiment.\n"
    "\n"
    "No sentiment: The sentence does not convey anything about the author’s positive or "
    "negative sentiment.\n"
    "\n"
    "Please specify what snippets of text, in the sentence, act as supporting evidence for your "
    "chosen label.\n"
    "\n"
    "{{think_instruction}}"
    "Then, respond only with a JSON object in this format (and no other text):\n"
    "\n"
    "{\n"
    "  \"label\": \"<one of the above categories>\",\n"
    "  \"rationale\": [\"word1\", \"word2\"]{{reasoning_line}}\n"
    "}\n"
    "\n"
    "Sentence:\n"
    "{{input_text}}\n";

const std::string kSstPersona =
    "Step into the shoes of a real person who {{persona_description}}.\n"
    "\n"
    "Imagine you have lived your whole life shaped by this trait. How might it affect your "
    "thoughts, emotions, sensitivities, and judgments?\n"
    "\n"
    "Task: read the following sentence and choose from one of the three labels:\n"
    "\n"
    "Positive: The sentence conveys information about the author’s positive evaluative "
    "sentiment.\n"
    "\n"
    "Negative: The sentence conveys information about the author’s negative evaluative "
    "sentiment.\n"
    "\n"
    "No sentiment: The sentence does not convey anything about the author’s positive or "
    "negative sentiment.\n"
    "\n"
    "Please specify what snippets of text, in the sentence, you think act as supporting evidence "
    "for your chosen label.\n"
    "\n"
    "{{think_instruction}}"
    "Answer it exactly as this person would—letting their background, beliefs, and life "
    "experiences guide your reasoning.\n"
    "\n"
    "Then, respond only with a JSON object in this format (and no other text):\n"
    "\n"
    "{\n"
    "  \"label\": \"<one of the above categories>\",\n"
    "  \"rationale\": [\"word1\", \"word2\"]{{reasoning_line}}\n"
    "}\n"
    "\n"
    "Sentence:\n"
    "{{input_text}}\n"
    "\n"
    "Rules:\n"
    "- Stay fully in character; do not break persona or add explanations outside the JSON.\n";

void replace_all(std::string & s, std::string_view needle, std::string_view value) {
    size_t pos = 0;
    while ((pos = s.find(needle, pos)) != std::string::npos) {
        s.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

std::string think_instruction(Task task, PersonaKind kind) {
    if (kind != PersonaKind::baseline) return kThinkPersona;
    return task == Task::hate3 ? kThinkHateBaseline : kThinkBaseline;
}

}  // namespace

const std::string & prompt_template(Task task, PersonaKind kind) {
    bool baseline = kind == PersonaKind::baseline;
    switch (task) {
        case Task::hate3: return baseline ? kHateBaseline : kHatePersona;
        case Task::cose: return baseline ? kCoseBaseline : kCosePersona;
        case Task::sst3: return baseline ? kSstBaseline : kSstPersona;
    }
    return kHateBaseline;
}

std::map<std::string, std::string> template_hashes() {
    std::map<std::string, std::string> out;
    for (Task task : {Task::hate3, Task::cose, Task::sst3}) {
        out[task_name(task) + ".baseline"] = digest_hex(prompt_template(task, PersonaKind::baseline));
        out[task_name(task) + ".persona"] = digest_hex(prompt_template(task, PersonaKind::single));
    }
    return out;
}

RenderedPrompt render(const PromptSpec & spec, const Instance & instance) {
    if (spec.task != instance.task) {
        throw ValidationError("prompt task " + task_name(spec.task) + " does not match instance " +
                              instance.id + " task " + task_name(instance.task));
    }
    std::string text = prompt_template(spec.task, spec.persona.kind);

    std::string think = spec.variant == PromptVariant::cot
                            ? think_instruction(spec.task, spec.persona.kind)
                            : std::string();
    replace_all(text, "{{think_instruction}}", think);

    std::string reasoning_line =
        spec.reasoning_field ? ",\n  \"reasoning\": \"<your reasoning>\"" : "";
    replace_all(text, "{{reasoning_line}}", reasoning_line);

    if (spec.persona.kind != PersonaKind::baseline) {
        replace_all(text, "{{persona_description}}", describe(spec.persona));
    }
    replace_all(text, "{{input_text}}", instance.text());

    if (spec.task == Task::cose) {
        std::string options;
        for (size_t i = 0; i < instance.options.size(); ++i) {
            if (i) options += '\n';
            options += std::to_string(i) + ". " + instance.options[i];
        }
        replace_all(text, "{{options}}", options);
    }

    RenderedPrompt out;
    out.text = std::move(text);
    if (spec.task == Task::cose) {
        out.schema = {"answer", "answer_index", "rationale"};
    } else {
        out.schema = {"label", "rationale"};
    }
    if (spec.reasoning_field) out.schema.push_back("reasoning");
    return out;
}

std::vector<WorkItem> plan_run(const std::vector<Instance> & instances,
                               const std::vector<Persona> & personas,
                               int runs) {
    if (runs < 1) throw ValidationError("plan_run: runs must be >= 1");
    std::vector<WorkItem> out;
    out.reserve(instances.size() * personas.size() * static_cast<size_t>(runs));
    for (const auto & inst : instances) {
        for (const auto & persona : personas) {
            for (int run = 1; run <= runs; ++run) {
                WorkItem item;
                item.instance_id = inst.id;
                item.persona_id = persona.id;
                item.run = run;
                item.key = inst.id + "|" + persona.id + "|r" + std::to_string(run);
                out.push_back(std::move(item));
            }
        }
    }
    return out;
}

}  // namespace ppaudit
