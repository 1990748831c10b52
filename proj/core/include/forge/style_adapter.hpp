#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "forge/architect.hpp"
#include "forge/model.hpp"
#include "forge/retrieval.hpp"
#include "forge/weaver.hpp"

namespace forge {

enum class OperatorClass { SU, RV, NI, AU, NR };

std::string_view to_string(OperatorClass cls);
OperatorClass operator_class_from_string(std::string_view text);

struct StyleOperator {
  std::string id;
  OperatorClass cls = OperatorClass::SU;
  std::string directive;
  double utility = 1.0;

  bool operator==(const StyleOperator&) const = default;
};

struct OperatorLibrary {
  std::vector<StyleOperator> operators;

  const StyleOperator* find(std::string_view id) const;
  // Validates: non-empty ids, unique, at least one operator per class,
  // utilities >= floor.
  void validate(double utility_floor) const;
};

// One template operator per class with unit starting utility.
OperatorLibrary default_operator_library();

struct AdapterConfig {
  double tau = 0.30;
  double lambda = 0.0;
  int max_generations = 8;         // G
  int subsets_per_generation = 4;  // K
  int subset_size_max = 3;
  double epsilon = 0.2;
  int stabilization_window = 3;
  double stabilization_tol = 0.01;
  double eta = 0.001;
  double utility_floor = 0.1;

  void validate() const;
};

struct Candidate {
  AdversarialPassage passage;
  std::vector<std::string> operators_applied;
  double similarity = 0.0;
  long long rt = 0;
  int acc = 0;
  double fitness = 0.0;
};

enum class RewriteMode { template_mode, generative };

// Per-candidate audit entry; generation 0 holds the initial champion.
struct AuditEntry {
  int generation = 0;
  std::vector<std::string> operator_ids;
  double similarity = 0.0;
  long long rt = 0;
  int acc = 0;
  double fitness = 0.0;
  bool champion = false;
};

struct AdaptResult {
  AdversarialPassage champion;
  double champion_fitness = 0.0;
  std::vector<double> fitness_history;  // F(P_0), F(P_1), ...
  std::vector<AuditEntry> audit;
  OperatorLibrary library;  // post-run utilities
  int generations_run = 0;
  bool stabilized_early = false;
};

// K operator-id subsets of size 1..subset_size_max. Each slot greedily
// takes the highest-utility unused operator (ties by ascending id) with
// probability 1-epsilon, else a uniformly random unused one.
std::vector<std::vector<std::string>> greedy_pick(const OperatorLibrary& lib,
                                                  const AdapterConfig& config,
                                                  Rng& rng);

// Applies each operator's fixed textual transformation to the unlocked
// spans; locked spans stay byte-identical and style_classes becomes the
// union of applied classes. Idempotent per operator. Generative mode is
// served by rewrite_generative; requesting it here is an error.
AdversarialPassage rewrite(const AdversarialPassage& passage,
                           const std::vector<StyleOperator>& subset,
                           RewriteMode mode = RewriteMode::template_mode);

// Asks the rewriter model for a restyled passage (unlocked prose only) and
// relocates the locked spans inside the returned text. Spans whose content
// the rewriter dropped come back degenerate, so the integrity gate catches
// them.
AdversarialPassage rewrite_generative(const AdversarialPassage& passage,
                                      const std::vector<StyleOperator>& subset,
                                      ModelAdapter& rewriter,
                                      std::string_view extra_directive = {});

// F(P) = rt if acc = 1, else (1 - lambda) * rt.
double fitness(long long rt, int acc, double lambda);

// Winning subset's operators each gain eta * delta / |subset|, clamped at
// the floor. No-op for an empty subset.
OperatorLibrary update_weights(OperatorLibrary lib,
                               const std::vector<std::string>& winning_subset,
                               double delta_fitness,
                               const AdapterConfig& config);

// True iff the last `window` consecutive relative changes
// |F_g - F_{g-1}| / max(F_{g-1}, 1) are all below tol.
bool stabilized(const std::vector<double>& champion_fitness_history,
                int window, double tol);

// Algorithm: evaluate P0, then per generation pick subsets, rewrite,
// gate on integrity + similarity >= tau + rank <= k, evaluate, select the
// next champion elitistically from candidates plus the current champion,
// and update weights; stops on stabilization or after max_generations.
AdaptResult adapt(const AdversarialPassage& p0,
                  const ContradictionBlueprint& blueprint,
                  OperatorLibrary lib, ModelAdapter& model,
                  const Retriever& retriever, const Task& task,
                  const Corpus& corpus, const AdapterConfig& config,
                  std::uint64_t seed, ModelAdapter* rewriter = nullptr);

nlohmann::json audit_entry_to_json(const AuditEntry& entry);
AuditEntry audit_entry_from_json(const nlohmann::json& value);

}  // namespace forge
