#include "qgen/keyterm/tfidf.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/text.hpp"

#include <algorithm>
#include <cmath>

namespace qgen::keyterm {

namespace {

std::size_t codepoint_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<RetrievalHit> rank_hits(std::vector<RetrievalHit> hits, std::size_t k) {
  std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.ordinal < b.ordinal;
  });
  if (hits.size() > k) hits.resize(k);
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
  return hits;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool contains_run(const std::vector<std::string>& longer, const std::vector<std::string>& shorter) {
  if (shorter.size() >= longer.size()) return false;
  return std::search(longer.begin(), longer.end(), shorter.begin(), shorter.end()) !=
         longer.end();
}

}  // namespace

std::vector<std::string> split_term(const std::string& term) {
  return text::split_whitespace(term);
}

std::size_t TfIdfModel::df(const std::string& term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double TfIdfModel::idf(const std::string& term) const {
  const double n = static_cast<double>(chunks_.size());
  return std::log((n + 1.0) / (static_cast<double>(df(term)) + 1.0)) + 1.0;
}

double TfIdfModel::tf(const std::string& term, std::size_t chunk_index) const {
  const ChunkStats& c = chunks_.at(chunk_index);
  auto it = c.counts.find(term);
  if (it == c.counts.end() || c.token_count == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(c.token_count);
}

double TfIdfModel::tfidf(const std::string& term, std::size_t chunk_index) const {
  return tf(term, chunk_index) * idf(term);
}

TfIdfModel build_tfidf(std::span<const chunkstore::Chunk> chunks, const TfIdfConfig& config) {
  TfIdfModel model;
  model.stopwords_ = config.stopwords;
  const int max_n = std::max(config.max_ngram, 1);

  for (const auto& chunk : chunks) {
    if (!chunk.is_text()) continue;
    TfIdfModel::ChunkStats stats;
    stats.id = chunk.id;
    stats.ordinal = chunk.ordinal;
    stats.text = chunk.text;
    const std::vector<Token> tokens = tokenize_terms(chunk.text);
    stats.token_count = tokens.size();

    auto usable = [&](const Token& t) { return codepoint_length(t.text) >= 2; };
    auto edge_ok = [&](const Token& t) { return config.stopwords.count(t.text) == 0; };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!usable(tokens[i]) || !edge_ok(tokens[i])) continue;
      std::string term = tokens[i].text;
      ++stats.counts[term];
      for (int n = 2; n <= max_n; ++n) {
        const std::size_t j = i + static_cast<std::size_t>(n) - 1;
        if (j >= tokens.size() || !tokens[j].joined || !usable(tokens[j])) break;
        term += ' ';
        term += tokens[j].text;
        if (edge_ok(tokens[j])) ++stats.counts[term];
      }
    }
    model.chunks_.push_back(std::move(stats));
  }
  if (model.chunks_.empty()) throw ValidationError("cannot build a tf-idf model from zero text chunks");

  std::sort(model.chunks_.begin(), model.chunks_.end(),
            [](const auto& a, const auto& b) {
              return a.ordinal != b.ordinal ? a.ordinal < b.ordinal : a.id < b.id;
            });
  for (const auto& c : model.chunks_) {
    for (const auto& [term, _] : c.counts) ++model.df_[term];
  }
  model.vocab_.reserve(model.df_.size());
  for (const auto& [term, _] : model.df_) model.vocab_.push_back(term);

  for (std::size_t i = 0; i < model.chunks_.size(); ++i) {
    double sq = 0.0;
    for (const auto& [term, _] : model.chunks_[i].counts) {
      if (term.find(' ') != std::string::npos) continue;
      const double w = model.tfidf(term, i);
      sq += w * w;
    }
    model.chunks_[i].unigram_norm = std::sqrt(sq);
  }
  return model;
}

std::vector<KeyTerm> extract_keyterms(const TfIdfModel& model, std::size_t K) {
  std::vector<KeyTerm> candidates;
  candidates.reserve(model.vocab().size());
  for (const auto& term : model.vocab()) {
    KeyTerm kt;
    kt.term = term;
    kt.score = -1.0;
    for (std::size_t i = 0; i < model.chunk_count(); ++i) {
      const double s = model.tfidf(term, i);
      if (s > kt.score) {
        kt.score = s;
        kt.best_chunk = model.chunks()[i].id;
      }
    }
    if (kt.score > 0.0) candidates.push_back(std::move(kt));
  }
  std::sort(candidates.begin(), candidates.end(), [](const KeyTerm& a, const KeyTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });

  std::vector<KeyTerm> selected;
  std::vector<std::vector<std::string>> selected_tokens;
  for (auto& cand : candidates) {
    if (selected.size() >= K) break;
    const auto toks = split_term(cand.term);
    bool subsumed = false;
    for (std::size_t s = 0; s < selected.size() && !subsumed; ++s) {
      subsumed = selected[s].score >= cand.score && contains_run(selected_tokens[s], toks);
    }
    if (subsumed) continue;
    selected_tokens.push_back(toks);
    selected.push_back(std::move(cand));
  }
  return selected;
}

std::vector<RetrievalHit> retrieve_topk(const TfIdfModel& model, const KeyTerm& term,
                                        std::size_t k) {
  std::vector<std::string> dims;
  for (auto& tok : split_term(text::fold_case(term.term))) {
    if (model.contains(tok) && std::find(dims.begin(), dims.end(), tok) == dims.end()) {
      dims.push_back(tok);
    }
  }
  if (dims.empty() || k == 0) return {};

  double query_norm = 0.0;
  for (const auto& d : dims) query_norm += model.idf(d) * model.idf(d);
  query_norm = std::sqrt(query_norm);

  std::vector<RetrievalHit> hits;
  for (std::size_t i = 0; i < model.chunk_count(); ++i) {
    const auto& c = model.chunks()[i];
    double dot = 0.0;
    for (const auto& d : dims) dot += model.idf(d) * model.tfidf(d, i);
    const double denom = c.unigram_norm * query_norm;
    RetrievalHit h;
    h.chunk_id = c.id;
    h.ordinal = c.ordinal;
    h.similarity = denom > 0.0 ? clamp01(dot / denom) : 0.0;
    hits.push_back(std::move(h));
  }
  return rank_hits(std::move(hits), k);
}

std::vector<RetrievalHit> retrieve_topk(const TfIdfModel& model, const KeyTerm& term,
                                        std::size_t k, const Embedder& embed) {
  if (k == 0) return {};
  std::vector<std::string> texts;
  texts.reserve(model.chunk_count() + 1);
  texts.push_back(term.term);
  for (const auto& c : model.chunks()) texts.push_back(c.text);
  const auto vectors = embed(texts);
  if (vectors.size() != texts.size()) {
    throw ValidationError("embedder returned " + std::to_string(vectors.size()) +
                          " vectors for " + std::to_string(texts.size()) + " texts");
  }
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  const auto& q = vectors.front();
  const double qn = norm(q);
  std::vector<RetrievalHit> hits;
  for (std::size_t i = 0; i < model.chunk_count(); ++i) {
    const auto& v = vectors[i + 1];
    if (v.size() != q.size()) throw ValidationError("embedding dimensions differ");
    double dot = 0.0;
    for (std::size_t d = 0; d < v.size(); ++d) dot += q[d] * v[d];
    const double denom = qn * norm(v);
    RetrievalHit h;
    h.chunk_id = model.chunks()[i].id;
    h.ordinal = model.chunks()[i].ordinal;
    h.similarity = denom > 0.0 ? clamp01(dot / denom) : 0.0;
    hits.push_back(std::move(h));
  }
  return rank_hits(std::move(hits), k);
}

}  // namespace qgen::keyterm
