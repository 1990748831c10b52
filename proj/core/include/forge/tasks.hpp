#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/util.hpp"

namespace forge {

// A QA item. gold_answer is a JSON number or string.
struct Task {
  std::string id;
  std::string question;
  std::string instruction;
  nlohmann::json gold_answer;
  double reference_claim = 0.0;

  bool operator==(const Task&) const = default;
};

struct TaskSet {
  std::vector<Task> tasks;

  const Task* find(std::string_view id) const;
  std::size_t size() const { return tasks.size(); }
  bool empty() const { return tasks.empty(); }
};

enum class Origin { clean, poison };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view text);

// Ground-truth structure of a synthetic passage. A document is conflicting
// exactly when the two truth counts disagree.
struct SimAnnotation {
  int logic_truth_count = 0;
  int evidence_truth_count = 0;
  int statement_count = 0;
  std::vector<std::string> style_classes;
  std::optional<double> truth_anchor;

  bool conflicting() const {
    return logic_truth_count != evidence_truth_count;
  }

  bool operator==(const SimAnnotation&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  Origin origin = Origin::clean;
  std::optional<SimAnnotation> annotations;

  bool conflicting() const {
    return annotations.has_value() && annotations->conflicting();
  }

  bool operator==(const Document&) const = default;
};

// Immutable after construction; the constructor enforces unique non-empty
// ids, non-empty text, and annotation count bounds.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  const Document* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Original documents in their original order, then the additions with
// origin forced to poison. Id collisions are an error.
Corpus inject(const Corpus& base, const std::vector<Document>& additions);

// Only the documents with origin == clean, order preserved.
Corpus clean_subset(const Corpus& corpus);

nlohmann::json task_to_json(const Task& task);
Task task_from_json(const nlohmann::json& value);
nlohmann::json annotation_to_json(const SimAnnotation& ann);
SimAnnotation annotation_from_json(const nlohmann::json& value);
nlohmann::json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& value);

TaskSet load_tasks(const std::filesystem::path& path);
void save_tasks(const TaskSet& tasks, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace forge
