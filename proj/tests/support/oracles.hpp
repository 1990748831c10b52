#pragma once

// Reference implementations kept deliberately separate from the library:
// every formula here is refolded from scratch so agreement is meaningful.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/metrics.hpp"
#include "forge/model.hpp"
#include "forge/retrieval.hpp"
#include "forge/tasks.hpp"
#include "forge/util.hpp"

namespace forge_test {

// FNV-1a 64, written against the published constants.
std::uint64_t ref_fnv1a64(std::string_view data);

// Reasoning-token formula refold: context serialization, whitespace token
// count, conflict sum, concision scaling, and budget cap are all rebuilt
// here without touching the model translation unit.
long long oracle_reasoning_tokens(const forge::SimulatorParams& params,
                                  const forge::Prompt& prompt);

struct OracleRanked {
  std::string doc_id;
  double score = 0.0;
};

// O(n^2) selection sort by (score desc, id asc) over freshly computed
// cosines.
std::vector<OracleRanked> oracle_rank(forge::Embedder& embedder,
                                      std::string_view query,
                                      const forge::Corpus& corpus);

struct OracleReport {
  double mean_clean = 0.0;
  double mean_adversarial = 0.0;
  double token_multiple = 0.0;
  double task_multiple = 0.0;
  double frac_gt2 = 0.0;
  double frac_gt5 = 0.0;
  double frac_gt10 = 0.0;
  double acc_clean = 0.0;
  double acc_adversarial = 0.0;
  double hit_rate = 0.0;
  int n = 0;
};

// Metrics refold. Folds in the same record order as the library so the
// comparison can be exact rather than toleranced.
OracleReport oracle_report(std::span<const forge::RunRecord> clean,
                           std::span<const forge::RunRecord> adversarial);

// Unique scratch directory under the system temp root; removed on
// destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Captures forge::warn output for the lifetime of the object.
class WarnCapture {
 public:
  WarnCapture();
  ~WarnCapture();

  const std::vector<std::string>& messages() const { return messages_; }
  bool any_contains(std::string_view needle) const;

 private:
  std::vector<std::string> messages_;
  forge::WarnHandler previous_;
};

}  // namespace forge_test
