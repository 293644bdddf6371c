#pragma once

#include "qgen/chunkstore/chunk.hpp"
#include "qgen/keyterm/tokenize.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qgen::keyterm {

struct TfIdfConfig {
  StopwordSet stopwords = default_stopwords();
  int max_ngram = 3;
};

// Term statistics over one document's text chunks, treating every chunk as a
// "document" for idf purposes:
//   tf(t,c)     = count(t,c) / |tokens(c)|
//   idf(t)      = ln((N+1)/(df(t)+1)) + 1
//   tfidf(t,c)  = tf(t,c) * idf(t)
// Candidate terms are 1..max_ngram grams of whitespace-adjacent tokens, each
// token alphanumeric with length >= 2, first and last token not stopwords.
// Immutable once built.
class TfIdfModel {
 public:
  struct ChunkStats {
    std::string id;
    std::size_t ordinal = 0;
    std::string text;
    std::size_t token_count = 0;
    std::map<std::string, int> counts;  // candidate term -> occurrences
    double unigram_norm = 0.0;          // L2 norm of the unigram tf-idf vector
  };

  std::size_t chunk_count() const noexcept { return chunks_.size(); }
  const std::vector<ChunkStats>& chunks() const noexcept { return chunks_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  const StopwordSet& stopwords() const noexcept { return stopwords_; }

  bool contains(const std::string& term) const { return df_.count(term) != 0; }
  std::size_t df(const std::string& term) const;
  double idf(const std::string& term) const;
  double tf(const std::string& term, std::size_t chunk_index) const;
  double tfidf(const std::string& term, std::size_t chunk_index) const;

 private:
  friend TfIdfModel build_tfidf(std::span<const chunkstore::Chunk>, const TfIdfConfig&);

  std::vector<ChunkStats> chunks_;  // sorted by (ordinal, id)
  std::map<std::string, std::size_t> df_;
  std::vector<std::string> vocab_;  // sorted
  StopwordSet stopwords_;
};

// Non-text chunks are ignored. Throws ValidationError when no text chunk is
// given. Input order does not matter.
TfIdfModel build_tfidf(std::span<const chunkstore::Chunk> chunks, const TfIdfConfig& config = {});

struct KeyTerm {
  std::string term;
  double score = 0.0;      // max tf-idf over chunks
  std::string best_chunk;  // chunk attaining the max (lowest ordinal on ties)
};

// Terms ranked by score (desc), ties lexicographic. A term is dropped when its
// tokens form a contiguous run inside an already selected longer term with a
// score at least as high. Returns at most K terms.
std::vector<KeyTerm> extract_keyterms(const TfIdfModel& model, std::size_t K);

struct RetrievalHit {
  std::string chunk_id;
  double similarity = 0.0;  // in [0, 1]
  std::size_t rank = 0;     // 1-based
  std::size_t ordinal = 0;
};

// Cosine similarity between the term and each chunk in the unigram tf-idf
// space: chunks are L2-normalized tf-idf vectors, the term is an idf-weighted
// indicator over its tokens. Sorted by (similarity desc, ordinal asc). A term
// none of whose tokens is in the vocabulary yields no hits.
std::vector<RetrievalHit> retrieve_topk(const TfIdfModel& model, const KeyTerm& term,
                                        std::size_t k);

// Remote-embedding variant: vectors come from the embedder (first text is the
// term, then every chunk in ordinal order).
using Embedder =
    std::function<std::vector<std::vector<double>>(const std::vector<std::string>& texts)>;

std::vector<RetrievalHit> retrieve_topk(const TfIdfModel& model, const KeyTerm& term,
                                        std::size_t k, const Embedder& embed);

std::vector<std::string> split_term(const std::string& term);

}  // namespace qgen::keyterm
