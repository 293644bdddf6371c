#include "qgen/qforge/generate.hpp"

#include "qgen/common/hash.hpp"
#include "qgen/common/rng.hpp"
#include "qgen/common/text.hpp"
#include "qgen/qforge/builders.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace qgen::qforge {

namespace {

constexpr QType kTextTypes[] = {QType::mcq, QType::truefalse, QType::fitb, QType::matching};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t slot, std::uint64_t candidate) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (slot * 0x9e3779b97f4a7c15ULL);
  std::uint64_t b = splitmix64(state);
  state = b ^ (candidate * 0xc2b2ae3d27d4eb4fULL);
  return splitmix64(state);
}

std::string item_id(const std::string& quiz_id, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", index);
  return quiz_id + "-" + buf;
}

class QuizBuilder {
 public:
  QuizBuilder(const chunkstore::StoredDocument& doc, const keyterm::TfIdfModel* model,
              const GenerationSpec& spec, backend::BackendClient& backend,
              const GenerateOptions& options)
      : doc_(doc), model_(model), spec_(spec), backend_(backend), options_(options) {}

  Quiz run() {
    spec_.validate();
    Quiz quiz;
    quiz.id = quiz_id_for(doc_.document.id, spec_);
    quiz.doc_id = doc_.document.id;
    quiz.seed = spec_.seed;
    quiz.created_at = options_.created_at;
    quiz.spec = spec_;

    if (model_) collect_pool();

    std::map<QType, int> remaining;
    for (QType t : kTextTypes) remaining[t] = spec_.count(t);
    auto pending = [&] {
      for (const auto& [_, n] : remaining) {
        if (n > 0) return true;
      }
      return false;
    };
    while (cursor_ < pool_.size() && pending()) {
      for (QType t : kTextTypes) {
        if (remaining[t] == 0) continue;
        std::optional<QuestionItem> item;
        while (!item && cursor_ < pool_.size()) {
          const std::size_t at = cursor_++;
          item = build(t, at);
        }
        if (!item) break;
        item->id = item_id(quiz.id, quiz.items.size());
        quiz.items.push_back(std::move(*item));
        --remaining[t];
      }
    }

    int visual_left = spec_.count(QType::visual);
    for (const auto& chunk : doc_.chunks) {
      if (visual_left <= 0) break;
      if (chunk.is_text()) continue;
      if (auto item = make_visual(chunk, backend_)) {
        item->id = item_id(quiz.id, quiz.items.size());
        quiz.items.push_back(std::move(*item));
        --visual_left;
      }
    }
    remaining[QType::visual] = visual_left;

    for (const auto& [t, n] : remaining) {
      if (n > 0) quiz.shortfall[t] = n;
    }
    return quiz;
  }

 private:
  void collect_pool() {
    terms_ = keyterm::extract_keyterms(*model_, spec_.K);
    std::set<std::string> seen;
    for (const auto& term : terms_) {
      std::vector<keyterm::RetrievalHit> hits;
      if (options_.backend_embeddings) {
        hits = keyterm::retrieve_topk(*model_, term, spec_.k,
                                      [&](const std::vector<std::string>& texts) {
                                        return backend_.embed(texts);
                                      });
      } else {
        hits = keyterm::retrieve_topk(*model_, term, spec_.k);
      }
      for (const auto& h : hits) {
        if (!seen.insert(h.chunk_id).second) continue;
        if (const chunkstore::Chunk* c = doc_.find_chunk(h.chunk_id)) pool_.push_back(c);
      }
    }
  }

  const backend::QaPair& qa_for(const chunkstore::Chunk& c) {
    auto it = qa_cache_.find(c.id);
    if (it != qa_cache_.end()) return it->second;
    backend::QaPair qa;
    try {
      qa = backend_.qa(c.text);
    } catch (const backend::BackendError& e) {
      throw ItemGenerationError(e.op(), c.id, e.what());
    }
    return qa_cache_.emplace(c.id, std::move(qa)).first->second;
  }

  // Generates candidates_per_item variants and keeps the one with the highest
  // reward (first on ties) when reward filtering is on.
  template <typename MakeFn>
  std::optional<QuestionItem> best_of(const chunkstore::Chunk& c, std::uint64_t slot, MakeFn make) {
    const int m = spec_.reward_filter ? spec_.candidates_per_item : 1;
    std::optional<QuestionItem> best;
    for (int v = 0; v < m; ++v) {
      Rng rng(derive_seed(spec_.seed, slot, static_cast<std::uint64_t>(v)));
      std::optional<QuestionItem> cand;
      try {
        cand = make(rng, v);
      } catch (const UnbuildableItem&) {
        continue;
      }
      if (spec_.reward_filter) {
        try {
          cand->reward_score = backend_.reward(c.text, cand->stem, cand->answer_text());
        } catch (const backend::BackendError& e) {
          throw ItemGenerationError(e.op(), c.id, e.what());
        }
      }
      if (!best || (cand->reward_score && *cand->reward_score > best->reward_score.value_or(-1e300))) {
        best = std::move(cand);
      }
    }
    return best;
  }

  std::optional<QuestionItem> build(QType t, std::size_t at) {
    const chunkstore::Chunk& c = *pool_[at];
    const std::uint64_t slot = slot_counter_++;
    switch (t) {
      case QType::mcq:
        return best_of(c, slot, [&](Rng& rng, int v) { return make_mcq(c, backend_, rng, v); });
      case QType::truefalse:
        return best_of(c, slot, [&](Rng&, int v) { return make_truefalse(c, backend_, v); });
      case QType::fitb:
        return make_fitb(c, terms_);
      case QType::matching:
        return build_matching(at, slot);
      case QType::visual:
        break;
    }
    return std::nullopt;
  }

  // The anchor chunk comes from the round-robin; remaining pairs are drawn
  // from the rest of the pool in order, wrapping around.
  std::optional<QuestionItem> build_matching(std::size_t anchor, std::uint64_t slot) {
    std::vector<SourcedPair> pairs;
    std::set<std::string> answers;
    for (std::size_t step = 0; step < pool_.size() && pairs.size() < spec_.matching_pairs; ++step) {
      const chunkstore::Chunk& c = *pool_[(anchor + step) % pool_.size()];
      const backend::QaPair& qa = qa_for(c);
      const std::string norm = text::normalize_option(qa.answer);
      if (qa.question.empty() || norm.empty() || !answers.insert(norm).second) continue;
      pairs.push_back({qa.question, qa.answer, c.id, c.locator, c.doc_id});
    }
    if (pairs.size() < spec_.matching_min_pairs) return std::nullopt;
    Rng rng(derive_seed(spec_.seed, slot, 0));
    return make_matching(pairs, rng, spec_.matching_min_pairs);
  }

  const chunkstore::StoredDocument& doc_;
  const keyterm::TfIdfModel* model_;
  const GenerationSpec& spec_;
  backend::BackendClient& backend_;
  const GenerateOptions& options_;

  std::vector<keyterm::KeyTerm> terms_;
  std::vector<const chunkstore::Chunk*> pool_;
  std::size_t cursor_ = 0;
  std::uint64_t slot_counter_ = 0;
  std::map<std::string, backend::QaPair> qa_cache_;
};

}  // namespace

std::string quiz_id_for(const std::string& doc_id, const GenerationSpec& spec) {
  return content_id({"quiz", doc_id, to_json(spec).dump()});
}

Quiz generate_quiz(const chunkstore::StoredDocument& doc, const keyterm::TfIdfModel& model,
                   const GenerationSpec& spec, backend::BackendClient& backend,
                   const GenerateOptions& options) {
  return QuizBuilder(doc, &model, spec, backend, options).run();
}

Quiz generate_quiz(const chunkstore::StoredDocument& doc, const GenerationSpec& spec,
                   backend::BackendClient& backend, const GenerateOptions& options,
                   const keyterm::TfIdfConfig& tfidf) {
  const bool has_text = std::any_of(doc.chunks.begin(), doc.chunks.end(),
                                    [](const chunkstore::Chunk& c) { return c.is_text(); });
  if (!has_text) return QuizBuilder(doc, nullptr, spec, backend, options).run();
  const keyterm::TfIdfModel model = keyterm::build_tfidf(doc.chunks, tfidf);
  return QuizBuilder(doc, &model, spec, backend, options).run();
}

}  // namespace qgen::qforge
