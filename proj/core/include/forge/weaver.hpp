#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/architect.hpp"
#include "forge/tasks.hpp"

namespace forge {

// Character range [start, end) plus a content hash so integrity checks
// survive re-serialization.
struct LockedSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string hash;

  bool operator==(const LockedSpan&) const = default;
};

struct WeaveOptions {
  std::size_t max_length = 2000;
};

// A rendered poison passage. The contradiction core lives inside the
// locked spans; stylistic rewrites may only touch the complement.
struct AdversarialPassage {
  std::string task_id;
  std::string blueprint_id;
  std::string text;
  std::vector<LockedSpan> locked_spans;
  SimAnnotation annotations;

  // Complement of the locked spans over [0, text.size()), possibly empty
  // ranges dropped.
  std::vector<std::pair<std::size_t, std::size_t>> unlocked_spans() const;

  // Locked span contents concatenated in order.
  std::string locked_text() const;

  Document to_document(std::string doc_id) const;

  bool operator==(const AdversarialPassage&) const = default;
};

// Question tokens minus interrogative stopwords, original case and order.
std::vector<std::string> content_words(std::string_view question);

// Deterministic template rendering: provenance opening (unlocked), the
// audit sentence, one statement sentence per evidence assignment, an
// anchor restatement (all locked), and a neutral closing (unlocked).
AdversarialPassage weave(const ContradictionBlueprint& blueprint,
                         const Task& task,
                         const WeaveOptions& options = WeaveOptions());

// True iff spans are in bounds, non-overlapping, hash-clean, and their
// concatenation still carries the logic rendering and every bound value,
// with annotations agreeing with the blueprint.
bool check_anchor_integrity(const AdversarialPassage& passage,
                            const ContradictionBlueprint& blueprint);

nlohmann::json passage_to_json(const AdversarialPassage& passage);
AdversarialPassage passage_from_json(const nlohmann::json& value);

}  // namespace forge
