#pragma once

#include "forge/defenses.hpp"
#include "forge/metrics.hpp"
#include "forge/model.hpp"
#include "forge/retrieval.hpp"
#include "forge/tasks.hpp"

namespace forge {

struct TaskEvaluation {
  RunRecord record;
  Prompt prompt;
};

// One retrieval + invocation round for a task: rank the corpus, apply the
// optional defense (filter or prompt suffix), compose, invoke, judge.
TaskEvaluation evaluate_task(const Task& task, const Corpus& corpus,
                             const Retriever& retriever, ModelAdapter& model,
                             Condition condition,
                             const DefenseSpec* defense = nullptr);

}  // namespace forge
