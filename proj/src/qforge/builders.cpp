#include "qgen/qforge/builders.hpp"

#include "qgen/common/text.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qgen::qforge {

namespace {

template <typename Fn>
auto guarded(const chunkstore::Chunk& chunk, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ItemGenerationError&) {
    throw;
  } catch (const backend::BackendError& e) {
    throw ItemGenerationError(e.op(), chunk.id, e.what());
  }
}

void require_text(const chunkstore::Chunk& chunk) {
  if (!chunk.is_text() || text::trim(chunk.text).empty()) {
    throw ValidationError("chunk " + chunk.id + " has no text to generate from");
  }
}

QuestionItem base_item(QType t, const chunkstore::Chunk& chunk) {
  QuestionItem item;
  item.qtype = t;
  item.source_chunks = {chunk.id};
  item.doc_id = chunk.doc_id;
  item.locator = chunk.locator;
  return item;
}

// Appends candidates that survive normalization against `seen`.
void keep_distinct(const std::vector<std::string>& candidates, std::set<std::string>& seen,
                   std::vector<std::string>& kept) {
  for (const auto& c : candidates) {
    if (kept.size() >= static_cast<std::size_t>(kDistractorsWanted)) return;
    const std::string norm = text::normalize_option(c);
    if (norm.empty() || !seen.insert(norm).second) continue;
    kept.push_back(c);
  }
}

}  // namespace

QuestionItem make_mcq(const chunkstore::Chunk& chunk, backend::BackendClient& backend, Rng& rng,
                      int variant) {
  require_text(chunk);
  return guarded(chunk, [&] {
    const backend::QaPair qa = backend.qa(chunk.text, variant);
    std::set<std::string> seen{text::normalize_option(qa.answer)};
    std::vector<std::string> distractors;
    keep_distinct(backend.distractors(chunk.text, qa.question, qa.answer, kDistractorsWanted), seen,
                  distractors);
    if (distractors.size() < static_cast<std::size_t>(kDistractorsWanted)) {
      keep_distinct(backend.distractors(chunk.text, qa.question, qa.answer, kDistractorsRetry),
                    seen, distractors);
    }
    if (distractors.empty()) {
      throw UnbuildableItem("no usable distractor for chunk " + chunk.id);
    }

    QuestionItem item = base_item(QType::mcq, chunk);
    item.stem = qa.question;
    if (distractors.size() < static_cast<std::size_t>(kDistractorsWanted)) {
      item.flags.push_back("degraded_options");
    }
    std::vector<std::size_t> order(distractors.size() + 1);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span(order));
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
      if (order[slot] == 0) {
        item.options.push_back(qa.answer);
        item.answer_key = AnswerKey(std::in_place_type<std::size_t>, slot);
      } else {
        item.options.push_back(distractors[order[slot] - 1]);
      }
    }
    return item;
  });
}

QuestionItem make_truefalse(const chunkstore::Chunk& chunk, backend::BackendClient& backend,
                            int variant) {
  require_text(chunk);
  return guarded(chunk, [&] {
    const backend::BoolQuestion q = backend.boolq(chunk.text, variant);
    QuestionItem item = base_item(QType::truefalse, chunk);
    item.stem = q.question;
    item.answer_key = AnswerKey(std::in_place_type<bool>, q.answer);
    return item;
  });
}

std::optional<QuestionItem> make_fitb(const chunkstore::Chunk& chunk,
                                      std::span<const keyterm::KeyTerm> keyterms) {
  if (!chunk.is_text() || chunk.text.find(kBlank) != std::string::npos) return std::nullopt;
  const std::vector<keyterm::Token> tokens = keyterm::tokenize_terms(chunk.text);

  struct Match {
    double score;
    std::size_t begin;
    std::size_t end;
  };
  std::optional<Match> best;
  for (const auto& kt : keyterms) {
    const auto parts = keyterm::split_term(text::fold_case(kt.term));
    if (parts.empty() || parts.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + parts.size() <= tokens.size(); ++i) {
      bool hit = true;
      for (std::size_t p = 0; p < parts.size() && hit; ++p) {
        hit = tokens[i + p].text == parts[p] && (p == 0 || tokens[i + p].joined);
      }
      if (!hit) continue;
      const Match m{kt.score, tokens[i].begin, tokens[i + parts.size() - 1].end};
      if (!best || m.score > best->score || (m.score == best->score && m.begin < best->begin)) {
        best = m;
      }
      break;
    }
  }
  if (!best) return std::nullopt;

  QuestionItem item = base_item(QType::fitb, chunk);
  item.stem = chunk.text.substr(0, best->begin) + std::string(kBlank) + chunk.text.substr(best->end);
  item.answer_key = AnswerKey(std::in_place_type<std::string>,
                              chunk.text.substr(best->begin, best->end - best->begin));
  return item;
}

QuestionItem make_matching(std::span<const SourcedPair> pairs, Rng& rng, std::size_t min_pairs) {
  if (pairs.size() < min_pairs) {
    throw UnbuildableItem("matching needs at least " + std::to_string(min_pairs) + " pairs, got " +
                          std::to_string(pairs.size()));
  }
  std::set<std::string> answers;
  for (const auto& p : pairs) {
    if (!answers.insert(text::normalize_option(p.answer)).second) {
      throw UnbuildableItem("matching answers must be distinct: '" + p.answer + "' repeats");
    }
  }

  const std::size_t n = pairs.size();
  std::vector<std::size_t> key(n);
  auto has_fixed_point = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      if (key[i] == i) return true;
    }
    return false;
  };
  do {
    std::iota(key.begin(), key.end(), 0);
    rng.shuffle(std::span(key));
  } while (has_fixed_point());

  QuestionItem item;
  item.qtype = QType::matching;
  item.stem = "Match each question with its answer.";
  item.doc_id = pairs.front().doc_id;
  item.locator = pairs.front().locator;
  item.matching.answers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    item.matching.prompts.push_back(pairs[i].question);
    item.matching.answers[key[i]] = pairs[i].answer;
    if (std::find(item.source_chunks.begin(), item.source_chunks.end(), pairs[i].chunk_id) ==
        item.source_chunks.end()) {
      item.source_chunks.push_back(pairs[i].chunk_id);
    }
  }
  item.answer_key = AnswerKey(std::in_place_type<std::vector<std::size_t>>, std::move(key));
  return item;
}

std::optional<QuestionItem> make_visual(const chunkstore::Chunk& image_chunk,
                                        backend::BackendClient& backend) {
  if (image_chunk.is_text() || image_chunk.image_ref.empty()) {
    throw ValidationError("chunk " + image_chunk.id + " is not an image chunk");
  }
  return guarded(image_chunk, [&]() -> std::optional<QuestionItem> {
    const backend::Classification label = backend.classify(image_chunk.image_ref);
    if (label.label != "diagram") return std::nullopt;
    const std::string question = backend.vqg(image_chunk.image_ref, backend::VqgMode::ask);
    const std::string answer = backend.vqg(image_chunk.image_ref, backend::VqgMode::answer, question);
    QuestionItem item = base_item(QType::visual, image_chunk);
    item.stem = question;
    item.answer_key = AnswerKey(std::in_place_type<std::string>, answer);
    item.note = backend.vqg(image_chunk.image_ref, backend::VqgMode::describe);
    return item;
  });
}

}  // namespace qgen::qforge
