#include "forge/http_adapters.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace forge {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash
};

SplitUrl split_url(const std::string& endpoint) {
  const std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw ValidationError("endpoint must include a scheme: " + endpoint);
  }
  const std::size_t path_start = endpoint.find('/', scheme + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.base = endpoint;
    out.path = "/";
  } else {
    out.base = endpoint.substr(0, path_start);
    out.path = endpoint.substr(path_start);
  }
  return out;
}

// POST with retry: transport failures and 5xx retry with exponential
// backoff, 4xx fail immediately.
std::string post_json(const std::string& endpoint, const std::string& body,
                      const httplib::Headers& headers, int max_attempts,
                      int backoff_initial_ms) {
  const SplitUrl url = split_url(endpoint);
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    httplib::Client client(url.base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    httplib::Result result =
        client.Post(url.path, headers, body, "application/json");
    if (result) {
      if (result->status >= 200 && result->status < 300) {
        return result->body;
      }
      last_error = "status " + std::to_string(result->status) + " from " +
                   endpoint;
      if (result->status < 500) {
        throw TransportError(last_error);
      }
    } else {
      last_error = "connection to " + endpoint + " failed (" +
                   httplib::to_string(result.error()) + ")";
    }
    if (attempt < max_attempts) {
      const int delay = backoff_initial_ms * (1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
  }
  throw TransportError(last_error + " after " +
                       std::to_string(max_attempts) + " attempts");
}

nlohmann::json parse_response(const std::string& body,
                              const std::string& endpoint) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError("unparseable response from " + endpoint + ": " +
                         e.what());
  }
}

}  // namespace

const nlohmann::json* json_at_path(const nlohmann::json& root,
                                   std::string_view path) {
  const nlohmann::json* node = &root;
  std::size_t begin = 0;
  while (begin <= path.size()) {
    const std::size_t dot = path.find('.', begin);
    const std::string_view segment =
        path.substr(begin, dot == std::string_view::npos ? std::string_view::npos
                                                         : dot - begin);
    if (segment.empty()) {
      return nullptr;
    }
    if (node->is_array()) {
      std::size_t index = 0;
      for (char c : segment) {
        if (c < '0' || c > '9') {
          return nullptr;
        }
        index = index * 10 + static_cast<std::size_t>(c - '0');
      }
      if (index >= node->size()) {
        return nullptr;
      }
      node = &(*node)[index];
    } else if (node->is_object()) {
      auto it = node->find(std::string(segment));
      if (it == node->end()) {
        return nullptr;
      }
      node = &(*it);
    } else {
      return nullptr;
    }
    if (dot == std::string_view::npos) {
      break;
    }
    begin = dot + 1;
  }
  return node;
}

HttpModel::HttpModel(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  if (descriptor_.endpoint.empty()) {
    throw ValidationError("http backend requires an endpoint");
  }
}

std::string HttpModel::name() const {
  return "http:" + descriptor_.model_name;
}

void HttpModel::set_raw_recorder(
    std::function<void(const std::string&)> recorder) {
  recorder_ = std::move(recorder);
}

ModelResponse HttpModel::invoke(const Prompt& prompt) {
  nlohmann::json request;
  request["model"] = descriptor_.model_name;
  request["messages"] = nlohmann::json::array(
      {{{"role", "user"}, {"content", serialize_prompt(prompt)}}});
  request["temperature"] = descriptor_.temperature;
  request["max_tokens"] = descriptor_.max_tokens;

  httplib::Headers headers;
  if (!descriptor_.auth_env.empty()) {
    const char* token = std::getenv(descriptor_.auth_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw ValidationError("auth env var " + descriptor_.auth_env +
                            " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string body =
      post_json(descriptor_.endpoint, request.dump(), headers,
                descriptor_.max_attempts, descriptor_.backoff_initial_ms);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  if (recorder_) {
    recorder_(body);
  }

  const nlohmann::json response = parse_response(body, descriptor_.endpoint);
  const nlohmann::json* tokens =
      json_at_path(response, descriptor_.reasoning_tokens_path);
  if (tokens == nullptr || !tokens->is_number()) {
    throw TransportError("backend lacks reasoning-token accounting (no " +
                         descriptor_.reasoning_tokens_path + " field)");
  }
  const nlohmann::json* answer =
      json_at_path(response, descriptor_.answer_path);
  if (answer == nullptr || !answer->is_string()) {
    throw TransportError("backend response lacks an answer at " +
                         descriptor_.answer_path);
  }

  ModelResponse out;
  out.reasoning_tokens = tokens->get<long long>();
  if (out.reasoning_tokens < 0) {
    throw TransportError("backend reported negative reasoning tokens");
  }
  out.answer = answer->get<std::string>();
  out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       elapsed)
                       .count();
  out.backend = name();
  return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, int max_attempts,
                           int backoff_initial_ms)
    : endpoint_(std::move(endpoint)),
      max_attempts_(max_attempts),
      backoff_initial_ms_(backoff_initial_ms) {
  if (endpoint_.empty()) {
    throw ValidationError("external embedder requires an endpoint");
  }
}

EmbeddingVector HttpEmbedder::embed(std::string_view text,
                                    EmbeddingRole role) {
  return embed_batch({std::string(text)}, role).front();
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(
    const std::vector<std::string>& texts, EmbeddingRole role) {
  nlohmann::json request;
  request["texts"] = texts;
  request["role"] = role == EmbeddingRole::query ? "query" : "document";

  const std::string body = post_json(endpoint_, request.dump(), {},
                                     max_attempts_, backoff_initial_ms_);
  const nlohmann::json response = parse_response(body, endpoint_);
  auto vectors_it = response.find("vectors");
  if (vectors_it == response.end() || !vectors_it->is_array() ||
      vectors_it->size() != texts.size()) {
    throw TransportError("embedder response lacks one vector per text");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::size_t dim = 0;
  for (const nlohmann::json& entry : *vectors_it) {
    if (!entry.is_array() || entry.empty()) {
      throw TransportError("embedder returned a non-numeric vector");
    }
    EmbeddingVector vec;
    vec.values.reserve(entry.size());
    for (const nlohmann::json& component : entry) {
      if (!component.is_number()) {
        throw TransportError("embedder returned a non-numeric vector");
      }
      vec.values.push_back(component.get<double>());
    }
    if (dim == 0) {
      dim = vec.dim();
    } else if (vec.dim() != dim) {
      throw TransportError("embedder returned vectors of mixed dimension");
    }
    out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace forge
