#include "forge/weaver.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace forge {

namespace {

const std::set<std::string>& question_stopwords() {
  static const std::set<std::string> kStopwords = {
      "how",  "many", "much", "what", "which", "who",  "whom", "when",
      "where", "why",  "is",   "are",  "was",   "were", "does", "do",
      "did",  "the",  "a",    "an",   "of",    "in",   "on",   "at",
      "to",   "for",  "and",  "or",   "it",    "its",  "have", "has",
      "had",  "there"};
  return kStopwords;
}

std::string join(const std::vector<std::string>& parts,
                 std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) {
      out += separator;
    }
    out += parts[i];
  }
  return out;
}

struct PassageBuilder {
  std::string text;
  std::vector<LockedSpan> spans;

  void add_unlocked(std::string_view sentence) {
    append_gap();
    text += sentence;
  }

  void add_locked(std::string_view sentence) {
    append_gap();
    LockedSpan span;
    span.start = text.size();
    text += sentence;
    span.end = text.size();
    span.hash = hash_hex(sentence);
    spans.push_back(std::move(span));
  }

 private:
  void append_gap() {
    if (!text.empty()) {
      text += ' ';
    }
  }
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>>
AdversarialPassage::unlocked_spans() const {
  std::vector<LockedSpan> sorted = locked_spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const LockedSpan& a, const LockedSpan& b) {
              return a.start < b.start;
            });
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t cursor = 0;
  for (const LockedSpan& span : sorted) {
    if (span.start > cursor) {
      out.emplace_back(cursor, span.start);
    }
    cursor = std::max(cursor, span.end);
  }
  if (cursor < text.size()) {
    out.emplace_back(cursor, text.size());
  }
  return out;
}

std::string AdversarialPassage::locked_text() const {
  std::vector<LockedSpan> sorted = locked_spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const LockedSpan& a, const LockedSpan& b) {
              return a.start < b.start;
            });
  std::string out;
  for (const LockedSpan& span : sorted) {
    if (span.end <= text.size() && span.start <= span.end) {
      out += text.substr(span.start, span.end - span.start);
    }
  }
  return out;
}

Document AdversarialPassage::to_document(std::string doc_id) const {
  Document doc;
  doc.id = std::move(doc_id);
  doc.text = text;
  doc.origin = Origin::poison;
  doc.annotations = annotations;
  return doc;
}

std::vector<std::string> content_words(std::string_view question) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      if (question_stopwords().count(lower(current)) == 0) {
        out.push_back(current);
      }
      current.clear();
    }
  };
  for (char c : question) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'' ||
        c == '-') {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

AdversarialPassage weave(const ContradictionBlueprint& blueprint,
                         const Task& task,
                         const WeaveOptions& options) {
  ValidationReport report = validate_blueprint(blueprint);
  if (!report.ok()) {
    throw ValidationError("cannot weave an invalid blueprint: " +
                          report.summary());
  }
  if (blueprint.decomposition.query != task.question) {
    throw ValidationError("blueprint was decomposed from a different task");
  }

  const std::string& entity = blueprint.decomposition.entities.front();
  PassageBuilder builder;

  std::ostringstream opening;
  opening << "Registry extract concerning "
          << join(blueprint.decomposition.entities, ", ")
          << ": recorded remarks on "
          << join(content_words(task.question), " ") << ".";
  builder.add_unlocked(opening.str());

  builder.add_locked(blueprint.logic.rendering);

  for (const EvidenceAssignment& e : blueprint.evidence) {
    std::ostringstream statement;
    statement << "Statement " << e.statement_index
              << ": the recorded figure for " << entity << " is "
              << format_number(e.value) << "; " << e.justification << ".";
    builder.add_locked(statement.str());
  }

  std::ostringstream anchor;
  anchor << "For reference, the figure of record for " << entity
         << " remains "
         << format_number(blueprint.decomposition.reference_claim) << ".";
  builder.add_locked(anchor.str());

  std::ostringstream closing;
  closing << "These remarks respond to the question \"" << task.question
          << "\" and may be superseded by later filings.";
  builder.add_unlocked(closing.str());

  if (builder.text.size() > options.max_length) {
    std::ostringstream os;
    os << "template overflow: passage length " << builder.text.size()
       << " exceeds " << options.max_length;
    throw ValidationError(os.str());
  }

  AdversarialPassage passage;
  passage.task_id = task.id;
  passage.blueprint_id = blueprint_id(blueprint);
  passage.text = std::move(builder.text);
  passage.locked_spans = std::move(builder.spans);
  passage.annotations.logic_truth_count = blueprint.logic.declared_true;
  passage.annotations.evidence_truth_count =
      blueprint.evidence_truth_count();
  passage.annotations.statement_count = blueprint.logic.statement_count;
  passage.annotations.truth_anchor =
      blueprint.decomposition.reference_claim;
  return passage;
}

bool check_anchor_integrity(const AdversarialPassage& passage,
                            const ContradictionBlueprint& blueprint) {
  std::vector<LockedSpan> sorted = passage.locked_spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const LockedSpan& a, const LockedSpan& b) {
              return a.start < b.start;
            });
  std::size_t cursor = 0;
  for (const LockedSpan& span : sorted) {
    if (span.start >= span.end || span.end > passage.text.size()) {
      return false;
    }
    if (span.start < cursor) {
      return false;  // overlap
    }
    cursor = span.end;
    std::string content =
        passage.text.substr(span.start, span.end - span.start);
    if (hash_hex(content) != span.hash) {
      return false;
    }
  }

  const std::string locked = passage.locked_text();
  if (locked.find(blueprint.logic.rendering) == std::string::npos) {
    return false;
  }
  for (const EvidenceAssignment& e : blueprint.evidence) {
    if (!contains_number_token(locked, e.value)) {
      return false;
    }
  }

  const SimAnnotation& ann = passage.annotations;
  if (ann.logic_truth_count != blueprint.logic.declared_true ||
      ann.evidence_truth_count != blueprint.evidence_truth_count() ||
      ann.statement_count != blueprint.logic.statement_count) {
    return false;
  }
  if (!ann.truth_anchor.has_value() ||
      *ann.truth_anchor != blueprint.decomposition.reference_claim) {
    return false;
  }
  return true;
}

nlohmann::json passage_to_json(const AdversarialPassage& passage) {
  nlohmann::json out;
  out["task_id"] = passage.task_id;
  out["blueprint_id"] = passage.blueprint_id;
  out["text"] = passage.text;
  nlohmann::json spans = nlohmann::json::array();
  for (const LockedSpan& span : passage.locked_spans) {
    nlohmann::json entry;
    entry["start"] = span.start;
    entry["end"] = span.end;
    entry["hash"] = span.hash;
    spans.push_back(entry);
  }
  out["locked_spans"] = spans;
  out["annotations"] = annotation_to_json(passage.annotations);
  return out;
}

AdversarialPassage passage_from_json(const nlohmann::json& value) {
  AdversarialPassage passage;
  try {
    passage.task_id = value.at("task_id").get<std::string>();
    passage.blueprint_id = value.at("blueprint_id").get<std::string>();
    passage.text = value.at("text").get<std::string>();
    for (const nlohmann::json& entry : value.at("locked_spans")) {
      LockedSpan span;
      span.start = entry.at("start").get<std::size_t>();
      span.end = entry.at("end").get<std::size_t>();
      span.hash = entry.at("hash").get<std::string>();
      passage.locked_spans.push_back(std::move(span));
    }
    passage.annotations = annotation_from_json(value.at("annotations"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("passage record: ") + e.what());
  }
  return passage;
}

}  // namespace forge
