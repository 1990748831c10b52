#include "forge/defense_prompts.hpp"

#include <cctype>
#include <sstream>

namespace forge {

namespace {
constexpr std::string_view kBudgetLead =
    "Let's think step by step and use less than ";
constexpr std::string_view kBudgetTail = " tokens in the reasoning part.";
}  // namespace

std::string budget_prompt(long long budget_tokens) {
  std::ostringstream os;
  os << kBudgetLead << budget_tokens << kBudgetTail;
  return os.str();
}

std::optional<long long> parse_budget_prompt(std::string_view instruction) {
  std::size_t lead = instruction.find(kBudgetLead);
  if (lead == std::string_view::npos) {
    return std::nullopt;
  }
  std::size_t pos = lead + kBudgetLead.size();
  long long value = 0;
  std::size_t digits = 0;
  while (pos < instruction.size() &&
         std::isdigit(static_cast<unsigned char>(instruction[pos]))) {
    value = value * 10 + (instruction[pos] - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0 || instruction.compare(pos, kBudgetTail.size(),
                                         kBudgetTail) != 0) {
    return std::nullopt;
  }
  return value;
}

}  // namespace forge
