#include "forge/util.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

namespace forge {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::mutex g_warn_mutex;
WarnHandler g_warn_handler;

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::string_view data) {
  std::uint64_t h = fnv1a64(data);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end &&
         std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> terms(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    out.push_back(std::move(current));
  }
  return out;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char raw : text) {
    bool space = std::isspace(static_cast<unsigned char>(raw)) != 0;
    if (!space && !in_token) {
      ++count;
    }
    in_token = !space;
  }
  return count;
}

std::string normalize_answer(std::string_view text) {
  std::string collapsed;
  bool pending_space = false;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed.push_back(' ');
      pending_space = false;
    }
    collapsed.push_back(static_cast<char>(std::tolower(c)));
  }
  return collapsed;
}

std::string number_word(long long n) {
  static constexpr std::array<const char*, 21> kWords = {
      "zero",    "one",     "two",       "three",    "four",
      "five",    "six",     "seven",     "eight",    "nine",
      "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
      "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
      "twenty"};
  if (n < 0 || n > 20) {
    return std::string();
  }
  return kWords[static_cast<std::size_t>(n)];
}

std::string format_number(double value) {
  if (std::isfinite(value) && value == std::floor(value) &&
      std::abs(value) < 9.007199254740992e15) {
    long long integral = static_cast<long long>(value);
    return std::to_string(integral);
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    // Unreachable for finite doubles with a 64-byte buffer.
    std::ostringstream os;
    os << value;
    return os.str();
  }
  return std::string(buf, ptr);
}

std::optional<double> parse_last_number(std::string_view text) {
  std::optional<double> result;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (start > 0 && (text[start - 1] == '+' || text[start - 1] == '-')) {
      --start;
    }
    std::size_t end = i;
    while (end < n && is_digit(text[end])) {
      ++end;
    }
    if (end < n && text[end] == '.' && end + 1 < n && is_digit(text[end + 1])) {
      ++end;
      while (end < n && is_digit(text[end])) {
        ++end;
      }
    }
    if (end < n && (text[end] == 'e' || text[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < n && (text[exp] == '+' || text[exp] == '-')) {
        ++exp;
      }
      if (exp < n && is_digit(text[exp])) {
        ++exp;
        while (exp < n && is_digit(text[exp])) {
          ++exp;
        }
        end = exp;
      }
    }
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(text.data() + start, text.data() + end, value);
    if (ec == std::errc() && ptr == text.data() + end) {
      result = value;
    }
    i = end;
  }
  return result;
}

bool contains_number_token(std::string_view text, double value) {
  const std::string needle = format_number(value);
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    bool left_ok = true;
    if (pos > 0) {
      char prev = text[pos - 1];
      if (is_digit(prev) || prev == '.' || prev == '-' || prev == '+') {
        left_ok = false;
      }
    }
    bool right_ok = true;
    std::size_t after = pos + needle.size();
    if (after < text.size()) {
      char next = text[after];
      if (is_digit(next)) {
        right_ok = false;
      } else if (next == '.' && after + 1 < text.size() &&
                 is_digit(text[after + 1])) {
        right_ok = false;
      }
    }
    if (left_ok && right_ok) {
      return true;
    }
    pos += 1;
  }
  return false;
}

nlohmann::json json_number(double value) {
  if (std::isfinite(value) && value == std::floor(value) &&
      std::abs(value) < 9.007199254740992e15) {
    return nlohmann::json(static_cast<std::int64_t>(value));
  }
  return nlohmann::json(value);
}

std::size_t Rng::next_index(std::size_t n) {
  if (n == 0) {
    throw ValidationError("next_index requires a non-empty range");
  }
  return static_cast<std::size_t>(engine_() % n);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  std::string key = std::to_string(root);
  key.push_back(':');
  key.append(label);
  return fnv1a64(key);
}

WarnHandler set_warn_handler(WarnHandler handler) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  WarnHandler previous = g_warn_handler;
  g_warn_handler = std::move(handler);
  return previous;
}

void warn(const std::string& message) {
  WarnHandler handler;
  {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    handler = g_warn_handler;
  }
  if (handler) {
    handler(message);
  } else {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ValidationError("cannot write file: " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw ValidationError("short write: " + path.string());
  }
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file: " + path.string());
  }
  std::vector<nlohmann::json> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": " << e.what();
      throw ValidationError(os.str());
    }
  }
  return records;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& records) {
  std::ostringstream out;
  for (const auto& record : records) {
    out << dump_sorted(record) << '\n';
  }
  write_text_file(path, out.str());
}

std::string dump_sorted(const nlohmann::json& value) {
  // nlohmann's default object map is std::map, so keys already serialize
  // in sorted order.
  return value.dump();
}

}  // namespace forge
