#include "forge/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "forge/http_adapters.hpp"

namespace forge {

double similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("embedding dimensions differ");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  return dot;
}

SurrogateEmbedder::SurrogateEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) {
    throw ValidationError("surrogate embedding dimension must be positive");
  }
}

EmbeddingVector SurrogateEmbedder::embed(std::string_view text,
                                         EmbeddingRole /*role*/) {
  EmbeddingVector out;
  out.values.assign(dim_, 0.0);
  for (const std::string& term : terms(text)) {
    out.values[fnv1a64(term) % dim_] += 1.0;
  }
  double norm_sq = 0.0;
  for (double v : out.values) {
    norm_sq += v * v;
  }
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : out.values) {
      v *= inv;
    }
  }
  return out;
}

Retriever::Retriever(RetrievalConfig config, std::shared_ptr<Embedder> embedder)
    : config_(config), embedder_(std::move(embedder)) {
  if (config_.k <= 0) {
    throw ValidationError("retrieval k must be positive");
  }
  if (!embedder_) {
    if (config_.provider == EmbeddingProvider::external) {
      embedder_ = std::make_shared<HttpEmbedder>(config_.endpoint,
                                                 config_.max_attempts,
                                                 config_.backoff_initial_ms);
    } else {
      embedder_ = std::make_shared<SurrogateEmbedder>(config_.surrogate_dim);
    }
  }
}

std::vector<RankedResult> Retriever::rank_all(std::string_view query,
                                              const Corpus& corpus) const {
  EmbeddingVector query_vec = embedder_->embed(query, EmbeddingRole::query);
  std::vector<RankedResult> results;
  results.reserve(corpus.size());
  for (const Document& doc : corpus.documents()) {
    EmbeddingVector doc_vec =
        embedder_->embed(doc.text, EmbeddingRole::document);
    results.push_back(RankedResult{doc.id, similarity(query_vec, doc_vec), 0});
  }
  std::sort(results.begin(), results.end(),
            [](const RankedResult& a, const RankedResult& b) {
              if (a.score != b.score) {
                return a.score > b.score;
              }
              return a.doc_id < b.doc_id;
            });
  for (std::size_t i = 0; i < results.size(); ++i) {
    results[i].rank = static_cast<int>(i) + 1;
  }
  return results;
}

std::vector<RankedResult> Retriever::top_k(std::string_view query,
                                           const Corpus& corpus) const {
  if (corpus.empty()) {
    throw ValidationError("top_k requires a non-empty corpus");
  }
  std::vector<RankedResult> ranked = rank_all(query, corpus);
  std::size_t keep =
      std::min(ranked.size(), static_cast<std::size_t>(config_.k));
  ranked.resize(keep);
  return ranked;
}

int Retriever::rank_of(std::string_view doc_id, std::string_view query,
                       const Corpus& corpus) const {
  for (const RankedResult& result : rank_all(query, corpus)) {
    if (result.doc_id == doc_id) {
      return result.rank;
    }
  }
  return 0;
}

double Retriever::text_similarity(std::string_view a, std::string_view b) const {
  return similarity(embedder_->embed(a, EmbeddingRole::query),
                    embedder_->embed(b, EmbeddingRole::document));
}

}  // namespace forge
