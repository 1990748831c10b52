#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace forge {

// Raised for malformed inputs, broken file contents, and violated
// preconditions. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a remote backend is unreachable or replies with garbage after
// retries are exhausted. The CLI maps this to exit code 2.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- hashing -----------------------------------------------------------

std::uint64_t fnv1a64(std::string_view data);

// 16 lowercase hex digits of fnv1a64(data).
std::string hash_hex(std::string_view data);

// --- text --------------------------------------------------------------

std::string lower(std::string_view text);
std::string trim(std::string_view text);

// Lowercased maximal [a-z0-9] runs, in order of appearance.
std::vector<std::string> terms(std::string_view text);

// Number of maximal non-whitespace runs.
std::size_t whitespace_token_count(std::string_view text);

// Collapse interior whitespace runs to single spaces, trim, lowercase.
std::string normalize_answer(std::string_view text);

// English number word for 0..20 ("zero".."twenty"); empty string outside
// that range (callers fall back to digits).
std::string number_word(long long n);

// --- numbers -----------------------------------------------------------

// Integral values print without a decimal point ("7", "-3"); everything
// else prints shortest round-trip ("3.7", "0.1").
std::string format_number(double value);

// Last decimal literal in the text, if any. Accepts an optional sign, an
// optional fraction, and an optional exponent.
std::optional<double> parse_last_number(std::string_view text);

// True when format_number(value) occurs in text as a standalone numeric
// token: not embedded in a longer digit run or decimal literal.
bool contains_number_token(std::string_view text, double value);

// Serialize a double the way the artifact files expect: integral values
// become JSON integers so reload/save round-trips are byte-identical.
nlohmann::json json_number(double value);

// --- deterministic rng -------------------------------------------------

// Thin wrapper over mt19937_64 with hand-pinned derivations so streams are
// reproducible across standard libraries (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of entropy.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). Precondition: n > 0.
  std::size_t next_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Stable per-scope seed derivation, e.g. task-local streams.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

// --- warnings ----------------------------------------------------------

using WarnHandler = std::function<void(const std::string&)>;

// Replace the process-wide warning sink; pass nullptr to restore the
// default (stderr). Returns the previous handler.
WarnHandler set_warn_handler(WarnHandler handler);
void warn(const std::string& message);

// --- files -------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// One parsed object per non-empty line. Parse failures carry the 1-based
// line number in the exception message.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

// Compact single-line serialization with sorted keys, one record per line.
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& records);

std::string dump_sorted(const nlohmann::json& value);

}  // namespace forge
