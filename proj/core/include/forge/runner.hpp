#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/architect.hpp"
#include "forge/defenses.hpp"
#include "forge/http_adapters.hpp"
#include "forge/metrics.hpp"
#include "forge/model.hpp"
#include "forge/retrieval.hpp"
#include "forge/style_adapter.hpp"
#include "forge/weaver.hpp"

namespace forge {

struct BackendConfig {
  std::string kind = "simulator";  // simulator | http
  SimulatorParams simulator;
  BackendDescriptor http;

  std::string label() const;
};

struct ExperimentConfig {
  // Empty paths select the bundled suite.
  std::filesystem::path task_file;
  std::filesystem::path corpus_file;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  int statement_count = 3;
  int workers = 4;
  BackendConfig backend;
  std::vector<BackendConfig> extra_backends;  // ablation comparisons
  RetrievalConfig retrieval;
  AdapterConfig adapter;
  std::vector<DefenseSpec> defenses;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& value);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

std::unique_ptr<ModelAdapter> make_backend(const BackendConfig& config,
                                           const TaskSet& tasks);

struct ArtifactRef {
  std::string path;  // relative to the experiment directory
  std::string hash;  // fnv1a64 hex of the file bytes
};

struct ExperimentManifest {
  nlohmann::json config_snapshot;
  std::map<std::string, ArtifactRef> artifacts;
  std::string created_at;  // ISO 8601 UTC; excluded from determinism claims
};

nlohmann::json manifest_to_json(const ExperimentManifest& manifest);
ExperimentManifest manifest_from_json(const nlohmann::json& value);

// Per-task forged artifacts. Tasks that failed a stage carry an error and
// no passages.
struct TaskForgeResult {
  std::string task_id;
  std::optional<ContradictionBlueprint> blueprint;
  std::optional<AdversarialPassage> p0;
  std::optional<AdversarialPassage> adapted;
  std::vector<AuditEntry> audit;
  std::string error;  // empty on success
};

// Blueprint -> weave -> adapt for every task, worker-parallel; failures
// are isolated per task. Skips the adapter when with_adapter is false.
std::vector<TaskForgeResult> forge_poisons(const ExperimentConfig& config,
                                           const TaskSet& tasks,
                                           const Corpus& corpus,
                                           const Retriever& retriever,
                                           ModelAdapter& model,
                                           bool with_adapter);

// Full pipeline: forge, inject, run clean/poisoned/defended, report,
// persist all artifacts under config.output_dir.
ExperimentManifest run_experiment(const ExperimentConfig& config);

// Re-hash every artifact referenced by the manifest in `dir`. Returns true
// when everything matches; mismatch descriptions appended otherwise.
bool verify_manifest(const std::filesystem::path& dir,
                     std::vector<std::string>* mismatches = nullptr);

enum class AblationStage { p0_only, full };

struct AblationRow {
  std::string backend;
  std::string condition;  // noadv | p0 | pn
  double mean_rt = 0.0;
  double acc = 0.0;
};

struct AblationReport {
  std::vector<AblationRow> rows;
};

// Per backend: clean baseline, P0 injection, and (with the full stage)
// adapted P_N injection.
AblationReport ablation(const ExperimentConfig& config,
                        const std::set<AblationStage>& stages);

std::string render_ablation(const AblationReport& report);
nlohmann::json ablation_to_json(const AblationReport& report);

}  // namespace forge
