#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge/tasks.hpp"

namespace forge {

enum class Condition { clean, poisoned, defended };

std::string_view to_string(Condition condition);
Condition condition_from_string(std::string_view text);

struct RunRecord {
  std::string task_id;
  Condition condition = Condition::clean;
  long long rt = 0;
  int acc = 0;
  bool poison_retrieved = false;
  std::vector<std::string> retrieved_ids;
  // Label of the applied defense for defended records; empty otherwise.
  std::string defense;

  bool operator==(const RunRecord&) const = default;
};

struct TokenLevelResult {
  double mean_clean = 0.0;
  double mean_poisoned = 0.0;
  double multiple = 0.0;
};

struct TaskLevelResult {
  double multiple = 0.0;
  std::map<int, double> frac_gt;  // thresholds 2, 5, 10
  int n = 0;                      // tasks actually included
};

struct MetricsReport {
  double token_level_mean_clean = 0.0;
  double token_level_mean_poisoned = 0.0;
  double token_multiple = 0.0;
  double task_multiple = 0.0;
  std::map<int, double> frac_gt;
  double acc_clean = 0.0;
  double acc_poisoned = 0.0;
  double hit_rate = 0.0;
  int n = 0;
};

// multiple = mean(rt_poisoned) / mean(rt_clean). Mean clean must be
// positive.
TokenLevelResult token_level(std::span<const RunRecord> clean,
                             std::span<const RunRecord> poisoned);

// Mean of per-task ratios plus threshold fractions. Pairs with a zero
// clean rt are excluded with a warning.
TaskLevelResult task_level(
    const std::vector<std::pair<long long, long long>>& pairs);

double hit_rate(std::span<const RunRecord> poisoned);

double accuracy(std::span<const RunRecord> records);

// Joins the two conditions by task_id (tasks present in both) and fills
// every report field. The adversarial side may be poisoned or defended.
MetricsReport compute_report(std::span<const RunRecord> clean,
                             std::span<const RunRecord> adversarial);

// Aligned two-section table: Tokens | Multiple | Acc, then the threshold
// fractions row.
std::string render_report(const MetricsReport& report);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& value);

nlohmann::json run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& value);

std::vector<RunRecord> load_run_log(const std::filesystem::path& path);
void save_run_log(const std::vector<RunRecord>& records,
                  const std::filesystem::path& path);

}  // namespace forge
