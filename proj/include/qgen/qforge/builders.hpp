#pragma once

#include "qgen/backend/client.hpp"
#include "qgen/chunkstore/chunk.hpp"
#include "qgen/common/rng.hpp"
#include "qgen/keyterm/tfidf.hpp"
#include "qgen/qforge/question.hpp"

#include <optional>
#include <span>
#include <string>

namespace qgen::qforge {

// A backend call failed while building an item from the given chunk.
class ItemGenerationError : public backend::BackendError {
 public:
  ItemGenerationError(const std::string& op, std::string chunk_id, const std::string& cause)
      : backend::BackendError(op, "item generation failed for chunk " + chunk_id + ": " + cause),
        chunk_id_(std::move(chunk_id)) {}
  const std::string& chunk_id() const noexcept { return chunk_id_; }

 private:
  std::string chunk_id_;
};

// The inputs cannot form a valid item (too few distinct matching answers, no
// surviving MCQ distractor). Generation moves on to the next chunk.
class UnbuildableItem : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr int kDistractorsWanted = 3;
inline constexpr int kDistractorsRetry = 6;

// QA pair plus three distractors. Options are deduplicated under
// normalize_option; with fewer than three survivors one re-request for six is
// made, after which the item is emitted with what is left and flagged
// "degraded_options". `variant` is forwarded to the qa call.
QuestionItem make_mcq(const chunkstore::Chunk& chunk, backend::BackendClient& backend, Rng& rng,
                      int variant = 0);

QuestionItem make_truefalse(const chunkstore::Chunk& chunk, backend::BackendClient& backend,
                            int variant = 0);

// Blanks the first whole-token, case-insensitive occurrence of the
// highest-scoring key term present in the chunk (ties: earliest occurrence).
// nullopt when no key term occurs.
std::optional<QuestionItem> make_fitb(const chunkstore::Chunk& chunk,
                                      std::span<const keyterm::KeyTerm> keyterms);

struct SourcedPair {
  std::string question;
  std::string answer;
  std::string chunk_id;
  chunkstore::Locator locator;
  std::string doc_id;
};

// Answers are permuted by a uniformly random derangement.
QuestionItem make_matching(std::span<const SourcedPair> pairs, Rng& rng, std::size_t min_pairs = 3);

// Classifier gate first: nullopt unless the image is labelled "diagram".
std::optional<QuestionItem> make_visual(const chunkstore::Chunk& image_chunk,
                                        backend::BackendClient& backend);

}  // namespace qgen::qforge
