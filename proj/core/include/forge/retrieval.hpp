#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "forge/tasks.hpp"

namespace forge {

enum class EmbeddingRole { query, document };

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

// Dot product of two unit vectors. Dimensions must match.
double similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text, EmbeddingRole role) = 0;
  virtual std::string name() const = 0;
};

// Deterministic hashed bag-of-words embedding: lowercase alphanumeric
// terms, fnv1a64(term) % dim buckets with term-frequency weights, then L2
// normalization. Query and document roles share the map.
class SurrogateEmbedder final : public Embedder {
 public:
  explicit SurrogateEmbedder(std::size_t dim = 4096);

  EmbeddingVector embed(std::string_view text, EmbeddingRole role) override;
  std::string name() const override { return "surrogate"; }
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
};

enum class EmbeddingProvider { surrogate, external };

struct RetrievalConfig {
  int k = 5;
  EmbeddingProvider provider = EmbeddingProvider::surrogate;
  std::size_t surrogate_dim = 4096;
  // Used only when provider == external.
  std::string endpoint;
  int max_attempts = 3;
  int backoff_initial_ms = 100;
};

struct RankedResult {
  std::string doc_id;
  double score = 0.0;
  int rank = 0;  // 1-based

  bool operator==(const RankedResult&) const = default;
};

class Retriever {
 public:
  explicit Retriever(RetrievalConfig config = RetrievalConfig(),
                     std::shared_ptr<Embedder> embedder = nullptr);

  // Every document scored against the query, sorted by descending score
  // with ascending doc id breaking ties. rank fields are 1-based.
  std::vector<RankedResult> rank_all(std::string_view query,
                                     const Corpus& corpus) const;

  // First min(k, corpus.size()) entries of rank_all. The corpus must be
  // non-empty.
  std::vector<RankedResult> top_k(std::string_view query,
                                  const Corpus& corpus) const;

  // 1-based rank of doc_id under the query, or 0 if absent.
  int rank_of(std::string_view doc_id, std::string_view query,
              const Corpus& corpus) const;

  double text_similarity(std::string_view a, std::string_view b) const;

  const RetrievalConfig& config() const { return config_; }
  Embedder& embedder() const { return *embedder_; }

 private:
  RetrievalConfig config_;
  std::shared_ptr<Embedder> embedder_;
};

}  // namespace forge
