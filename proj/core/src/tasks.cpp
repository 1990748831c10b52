#include "forge/tasks.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace forge {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw ValidationError(message);
}

const nlohmann::json& require_key(const nlohmann::json& value,
                                  const char* key,
                                  const char* what) {
  auto it = value.find(key);
  if (it == value.end()) {
    std::ostringstream os;
    os << what << " record is missing key \"" << key << "\"";
    fail(os.str());
  }
  return *it;
}

std::string require_string(const nlohmann::json& value, const char* key,
                           const char* what) {
  const nlohmann::json& field = require_key(value, key, what);
  if (!field.is_string()) {
    std::ostringstream os;
    os << what << " key \"" << key << "\" must be a string";
    fail(os.str());
  }
  return field.get<std::string>();
}

double require_number(const nlohmann::json& value, const char* key,
                      const char* what) {
  const nlohmann::json& field = require_key(value, key, what);
  if (!field.is_number()) {
    std::ostringstream os;
    os << what << " key \"" << key << "\" must be a number";
    fail(os.str());
  }
  return field.get<double>();
}

}  // namespace

const Task* TaskSet::find(std::string_view id) const {
  for (const Task& task : tasks) {
    if (task.id == id) {
      return &task;
    }
  }
  return nullptr;
}

std::string_view to_string(Origin origin) {
  return origin == Origin::clean ? "clean" : "poison";
}

Origin origin_from_string(std::string_view text) {
  if (text == "clean") {
    return Origin::clean;
  }
  if (text == "poison") {
    return Origin::poison;
  }
  fail("unknown origin \"" + std::string(text) + "\"");
}

Corpus::Corpus(std::vector<Document> documents)
    : documents_(std::move(documents)) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (doc.id.empty()) {
      fail("document with empty id");
    }
    if (doc.text.empty()) {
      fail("document \"" + doc.id + "\" has empty text");
    }
    if (doc.annotations.has_value()) {
      const SimAnnotation& ann = *doc.annotations;
      if (ann.statement_count < 0 || ann.logic_truth_count < 0 ||
          ann.evidence_truth_count < 0 ||
          ann.logic_truth_count > ann.statement_count ||
          ann.evidence_truth_count > ann.statement_count) {
        fail("document \"" + doc.id + "\" has out-of-range truth counts");
      }
    }
    auto [it, inserted] = index_.emplace(doc.id, i);
    if (!inserted) {
      fail("duplicate document id \"" + doc.id + "\"");
    }
  }
}

const Document* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &documents_[it->second];
}

Corpus inject(const Corpus& base, const std::vector<Document>& additions) {
  std::vector<Document> merged = base.documents();
  for (const Document& doc : additions) {
    if (base.contains(doc.id)) {
      fail("injected document id \"" + doc.id +
           "\" collides with the base corpus");
    }
    Document poisoned = doc;
    poisoned.origin = Origin::poison;
    merged.push_back(std::move(poisoned));
  }
  return Corpus(std::move(merged));
}

Corpus clean_subset(const Corpus& corpus) {
  std::vector<Document> kept;
  for (const Document& doc : corpus.documents()) {
    if (doc.origin == Origin::clean) {
      kept.push_back(doc);
    }
  }
  return Corpus(std::move(kept));
}

nlohmann::json task_to_json(const Task& task) {
  nlohmann::json out;
  out["id"] = task.id;
  out["question"] = task.question;
  out["instruction"] = task.instruction;
  out["gold_answer"] = task.gold_answer;
  out["reference_claim"] = json_number(task.reference_claim);
  return out;
}

Task task_from_json(const nlohmann::json& value) {
  if (!value.is_object()) {
    fail("task record must be a JSON object");
  }
  Task task;
  task.id = require_string(value, "id", "task");
  task.question = require_string(value, "question", "task");
  task.instruction = require_string(value, "instruction", "task");
  const nlohmann::json& gold = require_key(value, "gold_answer", "task");
  if (!gold.is_number() && !gold.is_string()) {
    fail("task \"" + task.id + "\" gold_answer must be a number or string");
  }
  task.gold_answer = gold;
  task.reference_claim = require_number(value, "reference_claim", "task");
  if (task.id.empty()) {
    fail("task with empty id");
  }
  if (task.question.empty()) {
    fail("task \"" + task.id + "\" has an empty question");
  }
  if (!std::isfinite(task.reference_claim)) {
    fail("task \"" + task.id + "\" reference_claim must be finite");
  }
  return task;
}

nlohmann::json annotation_to_json(const SimAnnotation& ann) {
  nlohmann::json out;
  out["logic_truth_count"] = ann.logic_truth_count;
  out["evidence_truth_count"] = ann.evidence_truth_count;
  out["statement_count"] = ann.statement_count;
  out["style_classes"] = ann.style_classes;
  if (ann.truth_anchor.has_value()) {
    out["truth_anchor"] = json_number(*ann.truth_anchor);
  }
  return out;
}

SimAnnotation annotation_from_json(const nlohmann::json& value) {
  if (!value.is_object()) {
    fail("annotations must be a JSON object");
  }
  SimAnnotation ann;
  ann.logic_truth_count = static_cast<int>(
      require_number(value, "logic_truth_count", "annotation"));
  ann.evidence_truth_count = static_cast<int>(
      require_number(value, "evidence_truth_count", "annotation"));
  ann.statement_count =
      static_cast<int>(require_number(value, "statement_count", "annotation"));
  if (auto it = value.find("style_classes"); it != value.end()) {
    if (!it->is_array()) {
      fail("annotation style_classes must be an array");
    }
    for (const auto& entry : *it) {
      if (!entry.is_string()) {
        fail("annotation style_classes entries must be strings");
      }
      ann.style_classes.push_back(entry.get<std::string>());
    }
  }
  if (auto it = value.find("truth_anchor"); it != value.end()) {
    if (!it->is_number()) {
      fail("annotation truth_anchor must be a number");
    }
    ann.truth_anchor = it->get<double>();
  }
  return ann;
}

nlohmann::json document_to_json(const Document& doc) {
  nlohmann::json out;
  out["id"] = doc.id;
  out["text"] = doc.text;
  out["origin"] = std::string(to_string(doc.origin));
  if (doc.annotations.has_value()) {
    out["annotations"] = annotation_to_json(*doc.annotations);
  }
  return out;
}

Document document_from_json(const nlohmann::json& value) {
  if (!value.is_object()) {
    fail("document record must be a JSON object");
  }
  Document doc;
  doc.id = require_string(value, "id", "document");
  doc.text = require_string(value, "text", "document");
  if (auto it = value.find("origin"); it != value.end()) {
    if (!it->is_string()) {
      fail("document origin must be a string");
    }
    doc.origin = origin_from_string(it->get<std::string>());
  }
  if (auto it = value.find("annotations"); it != value.end()) {
    doc.annotations = annotation_from_json(*it);
  }
  return doc;
}

TaskSet load_tasks(const std::filesystem::path& path) {
  TaskSet set;
  std::set<std::string> seen;
  for (const nlohmann::json& record : read_jsonl(path)) {
    Task task = task_from_json(record);
    if (!seen.insert(task.id).second) {
      fail("duplicate task id \"" + task.id + "\" in " + path.string());
    }
    set.tasks.push_back(std::move(task));
  }
  if (set.tasks.empty()) {
    warn("task file " + path.string() + " contains no tasks");
  }
  return set;
}

void save_tasks(const TaskSet& tasks, const std::filesystem::path& path) {
  std::vector<nlohmann::json> records;
  records.reserve(tasks.tasks.size());
  for (const Task& task : tasks.tasks) {
    records.push_back(task_to_json(task));
  }
  write_jsonl(path, records);
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::vector<Document> docs;
  for (const nlohmann::json& record : read_jsonl(path)) {
    docs.push_back(document_from_json(record));
  }
  try {
    return Corpus(std::move(docs));
  } catch (const ValidationError& e) {
    fail(path.string() + ": " + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::vector<nlohmann::json> records;
  records.reserve(corpus.size());
  for (const Document& doc : corpus.documents()) {
    records.push_back(document_to_json(doc));
  }
  write_jsonl(path, records);
}

}  // namespace forge
