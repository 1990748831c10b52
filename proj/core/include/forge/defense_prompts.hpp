#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace forge {

// Prompt-level defense strings. These are appended to instructions
// verbatim; the simulator also keys its defense response off them, so the
// bytes must not drift.
inline constexpr std::string_view kConcisePrompt = "Be concise.";
inline constexpr std::string_view kDraftPrompt =
    "Only keep a minimum draft for each thinking step, with 5 words at "
    "most.";

std::string budget_prompt(long long budget_tokens);

// Budget value carried by a budget-defense sentence inside the
// instruction, if present.
std::optional<long long> parse_budget_prompt(std::string_view instruction);

}  // namespace forge
