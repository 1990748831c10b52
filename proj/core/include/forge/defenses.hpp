#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/defense_prompts.hpp"
#include "forge/metrics.hpp"
#include "forge/model.hpp"
#include "forge/retrieval.hpp"

namespace forge {

enum class DefenseKind { ccot, cod, budget, trust_filter };

std::string_view to_string(DefenseKind kind);
// Accepts the kind names plus the CLI alias "trust".
DefenseKind defense_kind_from_string(std::string_view text);

struct DefenseSpec {
  DefenseKind kind = DefenseKind::ccot;
  std::optional<long long> budget_tokens;   // required for budget
  std::optional<double> trust_threshold;    // trust_filter, default 0.2
  bool strict_meta_flag = false;
  double meta_penalty = 0.5;  // pi

  bool is_prompt_defense() const { return kind != DefenseKind::trust_filter; }
  void validate() const;
};

// Appends the exact defense sentence to the instruction; question and
// context are untouched.
Prompt apply_prompt_defense(const Prompt& prompt, const DefenseSpec& spec);

// Case-insensitive audit-constraint pattern: "exactly <count> of the
// statements ... true ... false" with a number word or digits as count.
bool matches_audit_pattern(std::string_view text);

// Order-preserving filter over a ranking. Non-strict mode drops docs whose
// penalized score similarity - pi * meta_flag falls below the threshold;
// strict mode drops exactly the meta-flagged docs.
std::vector<RankedResult> trust_filter(const std::vector<RankedResult>& ranked,
                                       std::string_view query,
                                       const Corpus& corpus,
                                       const DefenseSpec& spec);

// Runs the bundled per-task pipeline twice per task: an undefended clean
// baseline and a defended pass over the mixed corpus; reports them side by
// side in the standard shape.
MetricsReport evaluate_defense(const TaskSet& tasks, const Corpus& corpus_mix,
                               ModelAdapter& model, const Retriever& retriever,
                               const DefenseSpec& spec,
                               std::vector<RunRecord>* records_out = nullptr);

nlohmann::json defense_spec_to_json(const DefenseSpec& spec);
DefenseSpec defense_spec_from_json(const nlohmann::json& value);

}  // namespace forge
