#include "forge/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "forge/defense_prompts.hpp"

namespace forge {

Prompt compose_prompt(std::string_view instruction, std::string_view question,
                      const std::vector<Document>& ranked_docs) {
  Prompt prompt;
  prompt.instruction = std::string(instruction);
  prompt.question = std::string(question);
  prompt.context_docs = ranked_docs;
  return prompt;
}

std::string serialize_context(const Prompt& prompt) {
  std::ostringstream os;
  for (std::size_t i = 0; i < prompt.context_docs.size(); ++i) {
    if (i != 0) {
      os << '\n';
    }
    const Document& doc = prompt.context_docs[i];
    os << "Context [" << (i + 1) << "] (doc " << doc.id << "): " << doc.text;
  }
  return os.str();
}

std::string serialize_prompt(const Prompt& prompt) {
  std::ostringstream os;
  os << "Instruction: " << prompt.instruction << "\n\n"
     << "Question: " << prompt.question << "\n\n"
     << serialize_context(prompt);
  return os.str();
}

long long context_token_count(const Prompt& prompt, double factor) {
  double scaled =
      static_cast<double>(whitespace_token_count(serialize_context(prompt))) *
      factor;
  return static_cast<long long>(std::floor(scaled));
}

long long simulator_reasoning_tokens(const SimulatorParams& params,
                                     const Prompt& prompt) {
  long long context_tokens =
      context_token_count(prompt, params.context_token_factor);
  long long rt =
      params.base +
      static_cast<long long>(std::floor(params.per_context_token *
                                        static_cast<double>(context_tokens)));

  double conflict_sum = 0.0;
  for (const Document& doc : prompt.context_docs) {
    if (!doc.conflicting()) {
      continue;
    }
    const SimAnnotation& ann = *doc.annotations;
    conflict_sum += static_cast<double>(
        params.conflict_base +
        params.per_statement * ann.statement_count +
        params.per_style_class *
            static_cast<long long>(ann.style_classes.size()));
  }

  const bool concise =
      prompt.instruction.find(kConcisePrompt) != std::string::npos ||
      prompt.instruction.find(kDraftPrompt) != std::string::npos;
  if (concise) {
    conflict_sum *= params.concision_conflict_factor;
  }
  rt += static_cast<long long>(std::floor(conflict_sum));

  if (std::optional<long long> budget =
          parse_budget_prompt(prompt.instruction)) {
    rt = std::min(rt, params.budget_cap_factor * *budget);
  }
  return rt;
}

std::string simulate_answer(const Prompt& prompt, const Task& task) {
  const double r = task.reference_claim;
  bool anchored = false;
  for (const Document& doc : prompt.context_docs) {
    if (contains_number_token(doc.text, r)) {
      anchored = true;
      break;
    }
    if (doc.annotations.has_value() &&
        doc.annotations->truth_anchor.has_value() &&
        *doc.annotations->truth_anchor == r) {
      anchored = true;
      break;
    }
  }
  if (anchored) {
    if (task.gold_answer.is_string()) {
      return task.gold_answer.get<std::string>();
    }
    return format_number(task.gold_answer.get<double>());
  }
  return format_number(r - 1.0);
}

int judge_accuracy(std::string_view answer, const nlohmann::json& gold) {
  if (gold.is_string()) {
    return normalize_answer(answer) ==
                   normalize_answer(gold.get<std::string>())
               ? 1
               : 0;
  }
  if (!gold.is_number()) {
    throw ValidationError("gold answer must be a number or string");
  }
  std::optional<double> parsed = parse_last_number(answer);
  if (!parsed.has_value()) {
    warn("unparseable numeric answer: \"" + std::string(answer) + "\"");
    return 0;
  }
  const double g = gold.get<double>();
  const double tolerance = 1e-6 * std::max(std::abs(g), 1.0);
  return std::abs(*parsed - g) <= tolerance ? 1 : 0;
}

SimulatorModel::SimulatorModel(SimulatorParams params, TaskSet tasks)
    : params_(params), tasks_(std::move(tasks)) {}

ModelResponse SimulatorModel::invoke(const Prompt& prompt) {
  const Task* task = nullptr;
  for (const Task& candidate : tasks_.tasks) {
    if (candidate.question == prompt.question) {
      task = &candidate;
      break;
    }
  }
  if (task == nullptr) {
    throw ValidationError("simulator has no task matching the question: \"" +
                          prompt.question + "\"");
  }
  ModelResponse response;
  response.reasoning_tokens = simulator_reasoning_tokens(params_, prompt);
  response.answer = simulate_answer(prompt, *task);
  response.latency_ms = 0;
  response.backend = name();
  return response;
}

}  // namespace forge
