#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/model.hpp"
#include "forge/retrieval.hpp"

namespace forge {

// Unified wire configuration for a live reasoning backend. The reasoning
// token count and answer are pulled out of the response via dot paths so
// vendor field naming stays out of the core.
struct BackendDescriptor {
  std::string endpoint;  // http(s)://host[:port]/path
  std::string model_name;
  std::string auth_env;  // env var holding the bearer token; may be empty
  double temperature = 0.0;
  int max_tokens = 4096;
  std::string reasoning_tokens_path = "usage.reasoning_tokens";
  std::string answer_path = "choices.0.message.content";
  int max_attempts = 3;
  int backoff_initial_ms = 100;
};

// Dot-path lookup with numeric segments indexing arrays; nullptr when the
// path does not resolve.
const nlohmann::json* json_at_path(const nlohmann::json& root,
                                   std::string_view path);

// POSTs {model, messages, temperature, max_tokens}; retries transport
// failures and 5xx with exponential backoff, fails fast on 4xx. A missing
// usage field is an error: the harness refuses backends without
// reasoning-token accounting.
class HttpModel final : public ModelAdapter {
 public:
  explicit HttpModel(BackendDescriptor descriptor);

  ModelResponse invoke(const Prompt& prompt) override;
  std::string name() const override;

  // Receives every raw response body verbatim, for post-hoc re-parsing.
  void set_raw_recorder(std::function<void(const std::string&)> recorder);

 private:
  BackendDescriptor descriptor_;
  std::function<void(const std::string&)> recorder_;
};

// POSTs {texts, role} and expects {vectors: [[...], ...]} with one vector
// per text, all of equal dimension.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, int max_attempts = 3,
               int backoff_initial_ms = 100);

  EmbeddingVector embed(std::string_view text, EmbeddingRole role) override;
  std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts, EmbeddingRole role);
  std::string name() const override { return "external"; }

 private:
  std::string endpoint_;
  int max_attempts_;
  int backoff_initial_ms_;
};

}  // namespace forge
