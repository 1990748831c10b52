#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "forge/tasks.hpp"

namespace forge {

// P = I ++ q ++ TopK(q; D). context_docs keeps retrieval rank order.
struct Prompt {
  std::string instruction;
  std::string question;
  std::vector<Document> context_docs;

  bool operator==(const Prompt&) const = default;
};

struct ModelResponse {
  long long reasoning_tokens = 0;
  std::string answer;
  long long latency_ms = 0;
  std::string backend;
};

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual ModelResponse invoke(const Prompt& prompt) = 0;
  virtual std::string name() const = 0;
};

Prompt compose_prompt(std::string_view instruction, std::string_view question,
                      const std::vector<Document>& ranked_docs);

// "Context [k] (doc id): text" lines in rank order, newline-joined. Empty
// for an empty context.
std::string serialize_context(const Prompt& prompt);

// Labeled Instruction / Question / Context sections.
std::string serialize_prompt(const Prompt& prompt);

struct SimulatorParams {
  long long base = 300;                  // B0
  double per_context_token = 0.1;        // B1
  long long conflict_base = 2000;        // C0
  long long per_statement = 800;         // C1
  long long per_style_class = 400;       // C2
  double context_token_factor = 1.3;
  // Simulator defense response, not ground truth: budget prompts cap rt at
  // budget_cap_factor * B; concision prompts scale the conflict term.
  long long budget_cap_factor = 2;
  double concision_conflict_factor = 0.6;
};

// floor(whitespace tokens of the serialized context * factor).
long long context_token_count(const Prompt& prompt, double factor);

// Deterministic reasoning-cost formula over the prompt's context
// annotations; instruction is scanned only for defense sentences.
long long simulator_reasoning_tokens(const SimulatorParams& params,
                                     const Prompt& prompt);

// Gold answer iff some context doc carries the reference claim (verbatim
// value or truth_anchor annotation); otherwise r-1 as text.
std::string simulate_answer(const Prompt& prompt, const Task& task);

// 1 iff the answer matches gold: trailing-number parse with relative
// tolerance 1e-6 for numeric gold, normalized exact match for strings.
// Unparseable numeric answers score 0 with a warning.
int judge_accuracy(std::string_view answer, const nlohmann::json& gold);

// Offline oracle backend. Pure; safe for concurrent invoke.
class SimulatorModel final : public ModelAdapter {
 public:
  SimulatorModel(SimulatorParams params, TaskSet tasks);

  ModelResponse invoke(const Prompt& prompt) override;
  std::string name() const override { return "simulator"; }
  const SimulatorParams& params() const { return params_; }

 private:
  SimulatorParams params_;
  TaskSet tasks_;
};

}  // namespace forge
