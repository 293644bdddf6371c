#pragma once

#include "qgen/backend/client.hpp"
#include "qgen/chunkstore/store.hpp"
#include "qgen/keyterm/tfidf.hpp"
#include "qgen/qforge/question.hpp"

#include <string>

namespace qgen::qforge {

struct GenerateOptions {
  std::string created_at;
  // Retrieve with backend embed vectors instead of the local tf-idf space.
  bool backend_embeddings = false;
};

std::string quiz_id_for(const std::string& doc_id, const GenerationSpec& spec);

// Key terms -> top-k chunks per term (deduplicated, first-seen order) ->
// round-robin over the requested text types; visual items come from the
// document's image chunks in order. Unmet counts are reported in
// Quiz::shortfall. Under the mock backend the result is a pure function of
// (document, spec).
Quiz generate_quiz(const chunkstore::StoredDocument& doc, const keyterm::TfIdfModel& model,
                   const GenerationSpec& spec, backend::BackendClient& backend,
                   const GenerateOptions& options = {});

// Builds the tf-idf model from the document's text chunks, then generates.
Quiz generate_quiz(const chunkstore::StoredDocument& doc, const GenerationSpec& spec,
                   backend::BackendClient& backend, const GenerateOptions& options = {},
                   const keyterm::TfIdfConfig& tfidf = {});

}  // namespace qgen::qforge
