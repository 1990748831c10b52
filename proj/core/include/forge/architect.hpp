#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "forge/tasks.hpp"

namespace forge {

// Structured reading of a task question, S = (q, I, E, r). intentions are
// recorded for inspection; construction keys off entities and the numeric
// reference claim.
struct Decomposition {
  std::string query;
  std::vector<std::string> intentions;
  std::vector<std::string> entities;
  double reference_claim = 0.0;

  bool operator==(const Decomposition&) const = default;
};

// The stated meta-constraint: N statements, N-1 declared true, rendered as
// an audit-style sentence.
struct LogicConstraint {
  int statement_count = 0;
  int declared_true = 0;
  int declared_false = 0;
  std::string rendering;

  bool operator==(const LogicConstraint&) const = default;
};

struct EvidenceAssignment {
  int statement_index = 0;  // 1-based
  double value = 0.0;       // v_i
  double delta = 0.0;       // 0 exactly for the anchor
  std::string justification;
  bool supported = false;   // evidence-layer truth

  bool operator==(const EvidenceAssignment&) const = default;
};

// One internally inconsistent claim set: the logic layer declares N-1 of N
// statements true while the evidence layer supports exactly one (the
// anchor, bound to the reference claim).
struct ContradictionBlueprint {
  std::string task_id;
  Decomposition decomposition;
  LogicConstraint logic;
  std::vector<EvidenceAssignment> evidence;

  int statement_count() const { return logic.statement_count; }
  int evidence_truth_count() const;
  int conflict_degree() const;
  // The unique supported assignment. Blueprint must be well formed.
  const EvidenceAssignment& anchor() const;

  bool operator==(const ContradictionBlueprint&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Maximal capitalized token runs, allowing lowercase connectives inside a
// run. Single capitalized words are dropped at sentence starts; numeric
// tokens always qualify. Returns candidates in order of appearance.
std::vector<std::string> extract_entities(std::string_view question);

std::vector<std::string> infer_intentions(std::string_view question);

Decomposition decompose(const Task& task);

// "According to an internal audit note, exactly {N-1} of the statements
// below are true and one is false.", with counts up to twenty spelled out.
std::string logic_rendering(int statement_count);

// Imposes the (N-1)T1F logic pattern and binds evidence via bind_evidence.
// Requires n >= 3 (below that the layers cannot disagree).
ContradictionBlueprint build_blueprint(const Decomposition& decomp, int n);

// Fills the evidence layer: anchor value r (supported) on statement 1,
// distractors r - i on statements i+1, each with a criteria-shift
// justification rotated by index.
ContradictionBlueprint bind_evidence(ContradictionBlueprint blueprint);

// Reports every violated blueprint invariant; empty report iff valid.
ValidationReport validate_blueprint(const ContradictionBlueprint& blueprint);

// Content hash over the canonical serialization; stable across runs.
std::string blueprint_id(const ContradictionBlueprint& blueprint);

nlohmann::json blueprint_to_json(const ContradictionBlueprint& blueprint);
ContradictionBlueprint blueprint_from_json(const nlohmann::json& value);

}  // namespace forge
