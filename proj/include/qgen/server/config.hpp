#pragma once

#include "qgen/backend/client.hpp"
#include "qgen/chunkstore/ingest.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace qgen::server {

using ojson = nlohmann::ordered_json;

// {
//   "store": "qgen-store",
//   "host": "127.0.0.1", "port": 8080,
//   "backend": {"mode": "mock"|"remote", "url": "...", "seed": 0,
//               "timeout_s": 30, "retries": 2, "backoff_base_s": 0.5,
//               "embeddings": false},
//   "defaults": {"K": 10, "k": 3, "chunk_words": 120, "overlap_sentences": 1},
//   "stopwords": "path/to/list.txt"
// }
// Every field is optional. Relative paths resolve against the config file's
// directory.
struct ServerConfig {
  std::filesystem::path store_root = "qgen-store";
  std::string host = "127.0.0.1";
  int port = 8080;
  backend::BackendConfig backend;
  bool backend_embeddings = false;
  std::size_t default_K = 10;
  std::size_t default_k = 3;
  chunkstore::ChunkConfig chunking;
  std::optional<std::filesystem::path> stopwords_path;

  void validate() const;  // throws ValidationError
};

ServerConfig config_from_json(const ojson& j, const std::filesystem::path& base_dir = {});
ojson to_json(const ServerConfig& c);

// Reads the file at `path`, or at $QGEN_CONFIG when path is empty; defaults
// when neither is set.
ServerConfig load_config(const std::optional<std::filesystem::path>& path = std::nullopt);

}  // namespace qgen::server
