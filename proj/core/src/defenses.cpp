#include "forge/defenses.hpp"

#include <regex>
#include <sstream>

#include "forge/pipeline.hpp"

namespace forge {

std::string_view to_string(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::ccot:
      return "ccot";
    case DefenseKind::cod:
      return "cod";
    case DefenseKind::budget:
      return "budget";
    case DefenseKind::trust_filter:
      return "trust_filter";
  }
  throw ValidationError("unknown defense kind");
}

DefenseKind defense_kind_from_string(std::string_view text) {
  if (text == "ccot") return DefenseKind::ccot;
  if (text == "cod") return DefenseKind::cod;
  if (text == "budget") return DefenseKind::budget;
  if (text == "trust_filter" || text == "trust") {
    return DefenseKind::trust_filter;
  }
  throw ValidationError("unknown defense kind \"" + std::string(text) + "\"");
}

void DefenseSpec::validate() const {
  if (kind == DefenseKind::budget) {
    if (!budget_tokens.has_value() || *budget_tokens <= 0) {
      throw ValidationError("budget defense requires budget_tokens > 0");
    }
  }
  if (trust_threshold.has_value() &&
      (*trust_threshold < -1.0 || *trust_threshold > 1.0)) {
    throw ValidationError("trust threshold out of range");
  }
  if (meta_penalty < 0.0) {
    throw ValidationError("meta penalty must be non-negative");
  }
}

Prompt apply_prompt_defense(const Prompt& prompt, const DefenseSpec& spec) {
  spec.validate();
  std::string sentence;
  switch (spec.kind) {
    case DefenseKind::ccot:
      sentence = std::string(kConcisePrompt);
      break;
    case DefenseKind::cod:
      sentence = std::string(kDraftPrompt);
      break;
    case DefenseKind::budget:
      sentence = budget_prompt(*spec.budget_tokens);
      break;
    case DefenseKind::trust_filter:
      throw ValidationError("trust_filter is not a prompt defense");
  }
  Prompt out = prompt;
  if (!out.instruction.empty()) {
    out.instruction += ' ';
  }
  out.instruction += sentence;
  return out;
}

bool matches_audit_pattern(std::string_view text) {
  static const std::regex kPattern(
      R"(exactly\s+(zero|one|two|three|four|five|six|seven|eight|nine|ten|)"
      R"(eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|)"
      R"(nineteen|twenty|[0-9]+)\s+of\s+the\s+statements\b[\s\S]*?\btrue\b)"
      R"([\s\S]*?\bfalse\b)",
      std::regex::icase);
  return std::regex_search(text.begin(), text.end(), kPattern);
}

std::vector<RankedResult> trust_filter(const std::vector<RankedResult>& ranked,
                                       std::string_view /*query*/,
                                       const Corpus& corpus,
                                       const DefenseSpec& spec) {
  if (spec.kind != DefenseKind::trust_filter) {
    throw ValidationError("trust_filter requires a trust_filter spec");
  }
  const double threshold = spec.trust_threshold.value_or(0.2);
  std::vector<RankedResult> kept;
  kept.reserve(ranked.size());
  for (const RankedResult& result : ranked) {
    const Document* doc = corpus.find(result.doc_id);
    if (doc == nullptr) {
      throw ValidationError("ranked doc \"" + result.doc_id +
                            "\" missing from the corpus");
    }
    const bool meta = matches_audit_pattern(doc->text);
    if (spec.strict_meta_flag) {
      if (meta) {
        continue;
      }
    } else {
      const double score =
          result.score - (meta ? spec.meta_penalty : 0.0);
      if (score < threshold) {
        continue;
      }
    }
    kept.push_back(result);
  }
  return kept;
}

MetricsReport evaluate_defense(const TaskSet& tasks, const Corpus& corpus_mix,
                               ModelAdapter& model, const Retriever& retriever,
                               const DefenseSpec& spec,
                               std::vector<RunRecord>* records_out) {
  spec.validate();
  const Corpus clean = clean_subset(corpus_mix);
  std::vector<RunRecord> clean_records;
  std::vector<RunRecord> defended_records;
  for (const Task& task : tasks.tasks) {
    clean_records.push_back(
        evaluate_task(task, clean, retriever, model, Condition::clean)
            .record);
    defended_records.push_back(evaluate_task(task, corpus_mix, retriever,
                                             model, Condition::defended,
                                             &spec)
                                   .record);
  }
  MetricsReport report = compute_report(clean_records, defended_records);
  if (records_out != nullptr) {
    records_out->insert(records_out->end(), clean_records.begin(),
                        clean_records.end());
    records_out->insert(records_out->end(), defended_records.begin(),
                        defended_records.end());
  }
  return report;
}

nlohmann::json defense_spec_to_json(const DefenseSpec& spec) {
  nlohmann::json out;
  out["kind"] = std::string(to_string(spec.kind));
  if (spec.budget_tokens.has_value()) {
    out["budget_tokens"] = *spec.budget_tokens;
  }
  if (spec.trust_threshold.has_value()) {
    out["trust_threshold"] = *spec.trust_threshold;
  }
  out["strict_meta_flag"] = spec.strict_meta_flag;
  out["meta_penalty"] = spec.meta_penalty;
  return out;
}

DefenseSpec defense_spec_from_json(const nlohmann::json& value) {
  DefenseSpec spec;
  spec.kind = defense_kind_from_string(value.at("kind").get<std::string>());
  if (auto it = value.find("budget_tokens"); it != value.end()) {
    spec.budget_tokens = it->get<long long>();
  }
  if (auto it = value.find("trust_threshold"); it != value.end()) {
    spec.trust_threshold = it->get<double>();
  }
  if (auto it = value.find("strict_meta_flag"); it != value.end()) {
    spec.strict_meta_flag = it->get<bool>();
  }
  if (auto it = value.find("meta_penalty"); it != value.end()) {
    spec.meta_penalty = it->get<double>();
  }
  spec.validate();
  return spec;
}

}  // namespace forge
