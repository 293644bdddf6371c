#pragma once

#include "qgen/chunkstore/chunk.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qgen::chunkstore {

struct StoredDocument {
  SourceDocument document;
  std::vector<Chunk> chunks;
  std::string ingested_at;

  const Chunk* find_chunk(const std::string& chunk_id) const;
};

// On-disk layout:
//   <root>/documents/<docid>/meta.json
//   <root>/documents/<docid>/chunks.jsonl
//   <root>/documents/<docid>/images/
//   <root>/documents/<docid>/quizzes/<quizid>.json
//   <root>/feedback.jsonl
//
// Documents are written once; writers for the same document are serialized
// and files are replaced atomically, so concurrent readers never observe a
// half-written document.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path document_dir(const std::string& doc_id) const;
  std::filesystem::path quiz_path(const std::string& doc_id, const std::string& quiz_id) const;
  std::filesystem::path feedback_path() const { return root_ / "feedback.jsonl"; }

  bool has_document(const std::string& doc_id) const;

  // Throws ConflictError (carrying the id) if the document already exists.
  // Image chunks whose image_ref resolves to a file under image_base are
  // copied into the document's images/ directory.
  void put_document(const SourceDocument& doc, const std::vector<Chunk>& chunks,
                    const std::optional<std::filesystem::path>& image_base = std::nullopt);

  StoredDocument load_document(const std::string& doc_id) const;
  std::vector<std::string> list_documents() const;

  void put_quiz(const std::string& doc_id, const std::string& quiz_id, const std::string& bytes);
  std::optional<std::string> read_quiz(const std::string& doc_id, const std::string& quiz_id) const;
  // Searches every document for the quiz; returns (doc_id, bytes).
  std::optional<std::pair<std::string, std::string>> find_quiz(const std::string& quiz_id) const;

 private:
  std::mutex& writer_lock(const std::string& doc_id);

  std::filesystem::path root_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

// Whole-file helpers shared by the store and the tools.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace qgen::chunkstore
