#pragma once

#include "forge/tasks.hpp"

namespace forge {

// Deterministic offline QA suite: 12 numeric lookup tasks over fictional
// civic infrastructure, three clean documents per task. Every gold
// document states the reference figure in digits; the other documents
// carry no digits at all, so the simulated answer rule is exercised only
// through gold documents and woven anchors.
TaskSet bundled_tasks();
Corpus bundled_corpus();

// Shared instruction used by every bundled task.
std::string_view bundled_instruction();

}  // namespace forge
