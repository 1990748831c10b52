#include "forge/pipeline.hpp"

#include <algorithm>

namespace forge {

TaskEvaluation evaluate_task(const Task& task, const Corpus& corpus,
                             const Retriever& retriever, ModelAdapter& model,
                             Condition condition, const DefenseSpec* defense) {
  std::vector<RankedResult> ranked = retriever.rank_all(task.question, corpus);
  if (defense != nullptr && defense->kind == DefenseKind::trust_filter) {
    ranked = trust_filter(ranked, task.question, corpus, *defense);
  }
  const std::size_t keep = std::min(
      ranked.size(), static_cast<std::size_t>(retriever.config().k));
  ranked.resize(keep);

  std::vector<Document> docs;
  docs.reserve(ranked.size());
  for (const RankedResult& result : ranked) {
    docs.push_back(*corpus.find(result.doc_id));
  }

  Prompt prompt = compose_prompt(task.instruction, task.question, docs);
  if (defense != nullptr && defense->is_prompt_defense()) {
    prompt = apply_prompt_defense(prompt, *defense);
  }

  ModelResponse response = model.invoke(prompt);

  TaskEvaluation out;
  out.record.task_id = task.id;
  out.record.condition = condition;
  out.record.rt = response.reasoning_tokens;
  out.record.acc = judge_accuracy(response.answer, task.gold_answer);
  for (const Document& doc : docs) {
    out.record.retrieved_ids.push_back(doc.id);
    if (doc.origin == Origin::poison) {
      out.record.poison_retrieved = true;
    }
  }
  if (defense != nullptr) {
    out.record.defense = std::string(to_string(defense->kind));
  }
  out.prompt = std::move(prompt);
  return out;
}

}  // namespace forge
