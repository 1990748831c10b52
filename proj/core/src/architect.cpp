#include "forge/architect.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace forge {

namespace {

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit_char(char c) { return c >= '0' && c <= '9'; }

struct QToken {
  std::string text;
  bool sentence_initial = false;
};

std::vector<QToken> question_tokens(std::string_view question) {
  std::vector<QToken> tokens;
  std::string current;
  bool at_sentence_start = true;
  bool current_initial = false;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(QToken{current, current_initial});
      current.clear();
    }
  };
  for (char c : question) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'' ||
        c == '-') {
      if (current.empty()) {
        current_initial = at_sentence_start;
        at_sentence_start = false;
      }
      current.push_back(c);
    } else {
      flush();
      if (c == '.' || c == '?' || c == '!') {
        at_sentence_start = true;
      }
    }
  }
  flush();
  return tokens;
}

bool capitalized(const std::string& token) {
  return !token.empty() && is_upper(token[0]);
}

bool numeric_token(const std::string& token) {
  if (token.empty()) {
    return false;
  }
  for (char c : token) {
    if (!is_digit_char(c) && c != '.') {
      return false;
    }
  }
  return true;
}

// Lowercase words allowed inside a capitalized run ("Port of Selwick").
bool connective(const std::string& token) {
  static const std::set<std::string> kConnectives = {"of", "the", "and",
                                                     "for", "de"};
  return kConnectives.count(lower(token)) > 0;
}

std::string count_phrase(int n) {
  std::string word = number_word(n);
  return word.empty() ? std::to_string(n) : word;
}

// Value-free criteria-shift rationales, rotated by statement index.
std::string justification_for(int statement_index, bool anchor) {
  if (anchor) {
    return "this figure matches the current official register";
  }
  static constexpr std::array<const char*, 3> kFamilies = {
      "under the alternative counting standard the survey applied",
      "within the narrower taxonomy boundary used for classification",
      "according to records predating the most recent survey"};
  return kFamilies[static_cast<std::size_t>(statement_index) %
                   kFamilies.size()];
}

}  // namespace

int ContradictionBlueprint::evidence_truth_count() const {
  int count = 0;
  for (const EvidenceAssignment& e : evidence) {
    count += e.supported ? 1 : 0;
  }
  return count;
}

int ContradictionBlueprint::conflict_degree() const {
  return std::abs(logic.declared_true - evidence_truth_count());
}

const EvidenceAssignment& ContradictionBlueprint::anchor() const {
  for (const EvidenceAssignment& e : evidence) {
    if (e.supported) {
      return e;
    }
  }
  throw ValidationError("blueprint has no supported evidence assignment");
}

std::string ValidationReport::summary() const {
  if (violations.empty()) {
    return "ok";
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i != 0) {
      os << "; ";
    }
    os << violations[i];
  }
  return os.str();
}

std::vector<std::string> extract_entities(std::string_view question) {
  std::vector<QToken> tokens = question_tokens(question);
  std::vector<std::string> entities;
  std::set<std::string> seen;
  auto add = [&](const std::string& entity) {
    if (seen.insert(entity).second) {
      entities.push_back(entity);
    }
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    if (numeric_token(tokens[i].text)) {
      add(tokens[i].text);
      ++i;
      continue;
    }
    if (!capitalized(tokens[i].text)) {
      ++i;
      continue;
    }
    // Extend the run, letting connectives join two capitalized tokens.
    std::size_t end = i + 1;
    std::size_t last_cap = i;
    while (end < tokens.size()) {
      if (capitalized(tokens[end].text)) {
        last_cap = end;
        ++end;
      } else if (connective(tokens[end].text) && end + 1 < tokens.size() &&
                 capitalized(tokens[end + 1].text)) {
        end += 2;
        last_cap = end - 1;
      } else {
        break;
      }
    }
    std::size_t run_len = last_cap - i + 1;
    if (run_len >= 2 || !tokens[i].sentence_initial) {
      std::string joined;
      for (std::size_t j = i; j <= last_cap; ++j) {
        if (!joined.empty()) {
          joined.push_back(' ');
        }
        joined += tokens[j].text;
      }
      add(joined);
    }
    i = last_cap + 1;
  }
  return entities;
}

std::vector<std::string> infer_intentions(std::string_view question) {
  std::string q = lower(question);
  std::vector<std::string> intentions;
  auto has = [&](std::string_view phrase) {
    return q.find(phrase) != std::string::npos;
  };
  if (has("how many") || has("number of") || has("count of")) {
    intentions.push_back("count");
  }
  if (has("what is") || has("what was") || has("what are")) {
    intentions.push_back("lookup");
  }
  if (has("total") || has("combined") || has("sum")) {
    intentions.push_back("aggregate");
  }
  if (intentions.empty()) {
    intentions.push_back("lookup");
  }
  return intentions;
}

Decomposition decompose(const Task& task) {
  Decomposition decomp;
  decomp.query = task.question;
  decomp.intentions = infer_intentions(task.question);
  decomp.entities = extract_entities(task.question);
  decomp.reference_claim = task.reference_claim;
  if (decomp.entities.empty()) {
    throw ValidationError(
        "no extractable entities in question of task \"" + task.id +
        "\"; provide an entity override");
  }
  return decomp;
}

std::string logic_rendering(int statement_count) {
  std::ostringstream os;
  os << "According to an internal audit note, exactly "
     << count_phrase(statement_count - 1)
     << " of the statements below are true and one is false.";
  return os.str();
}

ContradictionBlueprint build_blueprint(const Decomposition& decomp, int n) {
  if (n < 3) {
    std::ostringstream os;
    os << "statement count " << n
       << " rejected: the logic and evidence layers cannot disagree below 3";
    throw ValidationError(os.str());
  }
  if (decomp.entities.empty()) {
    throw ValidationError("decomposition has no entities");
  }
  ContradictionBlueprint blueprint;
  blueprint.decomposition = decomp;
  blueprint.logic.statement_count = n;
  blueprint.logic.declared_true = n - 1;
  blueprint.logic.declared_false = 1;
  blueprint.logic.rendering = logic_rendering(n);
  return bind_evidence(std::move(blueprint));
}

ContradictionBlueprint bind_evidence(ContradictionBlueprint blueprint) {
  const double r = blueprint.decomposition.reference_claim;
  if (!std::isfinite(r)) {
    throw ValidationError("reference claim must be finite");
  }
  const int n = blueprint.logic.statement_count;
  blueprint.evidence.clear();
  blueprint.evidence.reserve(static_cast<std::size_t>(n));
  EvidenceAssignment anchor;
  anchor.statement_index = 1;
  anchor.value = r;
  anchor.delta = 0.0;
  anchor.supported = true;
  anchor.justification = justification_for(1, true);
  blueprint.evidence.push_back(anchor);
  for (int i = 1; i <= n - 1; ++i) {
    EvidenceAssignment distractor;
    distractor.statement_index = i + 1;
    distractor.delta = static_cast<double>(i);
    distractor.value = r - distractor.delta;
    distractor.supported = false;
    distractor.justification = justification_for(i + 1, false);
    blueprint.evidence.push_back(distractor);
  }
  return blueprint;
}

ValidationReport validate_blueprint(const ContradictionBlueprint& blueprint) {
  ValidationReport report;
  auto violation = [&](const std::string& message) {
    report.violations.push_back(message);
  };

  const int n = blueprint.logic.statement_count;
  if (blueprint.decomposition.entities.empty()) {
    violation("decomposition: entities empty");
  }
  if (blueprint.logic.declared_true + blueprint.logic.declared_false != n) {
    violation("logic pattern: declared counts do not partition N");
  }
  if (blueprint.logic.declared_true != n - 1 ||
      blueprint.logic.declared_false != 1) {
    violation("logic pattern: expected (N-1)T1F");
  }
  if (static_cast<int>(blueprint.evidence.size()) != n) {
    violation("evidence: assignment count differs from N");
  }

  int supported = 0;
  std::set<double> values;
  bool anchor_ok = false;
  for (const EvidenceAssignment& e : blueprint.evidence) {
    values.insert(e.value);
    if (e.supported) {
      ++supported;
      if (e.value == blueprint.decomposition.reference_claim &&
          e.delta == 0.0) {
        anchor_ok = true;
      }
    } else {
      if (e.delta <= 0.0) {
        violation("evidence: distractor delta must be positive");
      }
      if (e.value !=
          blueprint.decomposition.reference_claim - e.delta) {
        violation("evidence: distractor value does not match r - delta");
      }
      if (e.justification.empty()) {
        violation("evidence: distractor justification empty");
      }
    }
  }
  if (supported != 1) {
    violation("evidence pattern: expected exactly one supported assignment");
  } else if (!anchor_ok) {
    violation("anchor: supported value must equal the reference claim");
  }
  if (values.size() != blueprint.evidence.size()) {
    violation("evidence: values not pairwise distinct");
  }
  if (blueprint.logic.declared_true - supported != n - 2 && n >= 3) {
    violation("conflict degree: expected N-2");
  }
  return report;
}

namespace {

// Everything except the id itself; the id is the hash of this record.
nlohmann::json blueprint_core_json(const ContradictionBlueprint& blueprint) {
  nlohmann::json out;
  out["task_id"] = blueprint.task_id;
  nlohmann::json decomp;
  decomp["query"] = blueprint.decomposition.query;
  decomp["intentions"] = blueprint.decomposition.intentions;
  decomp["entities"] = blueprint.decomposition.entities;
  decomp["reference_claim"] =
      json_number(blueprint.decomposition.reference_claim);
  out["decomposition"] = decomp;
  nlohmann::json logic;
  logic["statement_count"] = blueprint.logic.statement_count;
  logic["declared_true"] = blueprint.logic.declared_true;
  logic["declared_false"] = blueprint.logic.declared_false;
  logic["rendering"] = blueprint.logic.rendering;
  out["logic"] = logic;
  nlohmann::json evidence = nlohmann::json::array();
  for (const EvidenceAssignment& e : blueprint.evidence) {
    nlohmann::json entry;
    entry["statement_index"] = e.statement_index;
    entry["value"] = json_number(e.value);
    entry["delta"] = json_number(e.delta);
    entry["justification"] = e.justification;
    entry["supported"] = e.supported;
    evidence.push_back(entry);
  }
  out["evidence"] = evidence;
  return out;
}

}  // namespace

std::string blueprint_id(const ContradictionBlueprint& blueprint) {
  return hash_hex(dump_sorted(blueprint_core_json(blueprint)));
}

nlohmann::json blueprint_to_json(const ContradictionBlueprint& blueprint) {
  nlohmann::json out = blueprint_core_json(blueprint);
  out["blueprint_id"] = hash_hex(dump_sorted(out));
  return out;
}

ContradictionBlueprint blueprint_from_json(const nlohmann::json& value) {
  ContradictionBlueprint blueprint;
  try {
    blueprint.task_id = value.at("task_id").get<std::string>();
    const nlohmann::json& decomp = value.at("decomposition");
    blueprint.decomposition.query = decomp.at("query").get<std::string>();
    blueprint.decomposition.intentions =
        decomp.at("intentions").get<std::vector<std::string>>();
    blueprint.decomposition.entities =
        decomp.at("entities").get<std::vector<std::string>>();
    blueprint.decomposition.reference_claim =
        decomp.at("reference_claim").get<double>();
    const nlohmann::json& logic = value.at("logic");
    blueprint.logic.statement_count = logic.at("statement_count").get<int>();
    blueprint.logic.declared_true = logic.at("declared_true").get<int>();
    blueprint.logic.declared_false = logic.at("declared_false").get<int>();
    blueprint.logic.rendering = logic.at("rendering").get<std::string>();
    for (const nlohmann::json& entry : value.at("evidence")) {
      EvidenceAssignment e;
      e.statement_index = entry.at("statement_index").get<int>();
      e.value = entry.at("value").get<double>();
      e.delta = entry.at("delta").get<double>();
      e.justification = entry.at("justification").get<std::string>();
      e.supported = entry.at("supported").get<bool>();
      blueprint.evidence.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("blueprint record: ") + e.what());
  }
  return blueprint;
}

}  // namespace forge
