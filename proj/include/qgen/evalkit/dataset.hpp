#pragma once

#include "qgen/common/error.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qgen::evalkit {

enum class DatasetFormat { squad_v1, boolq_jsonl, pairs_jsonl };

std::string_view to_string(DatasetFormat f);
DatasetFormat dataset_format_from_string(std::string_view name);

// Reference answers are text, except for boolq rows.
using RefAnswer = std::variant<std::string, bool>;
std::string answer_text(const RefAnswer& a);

struct EvalExample {
  std::string id;
  std::string context;
  std::string reference_question;  // never empty
  RefAnswer reference_answer;
};

// Parse or schema failure. `location` is "line N" (1-based) for JSON-Lines,
// "byte N" for JSON syntax errors, or a JSON pointer for schema errors.
class DatasetError : public ValidationError {
 public:
  DatasetError(std::string path, std::string location, const std::string& why)
      : ValidationError(path + ": " + location + ": " + why),
        path_(std::move(path)),
        location_(std::move(location)) {}
  const std::string& path() const noexcept { return path_; }
  const std::string& location() const noexcept { return location_; }

 private:
  std::string path_;
  std::string location_;
};

// squad_v1: data[].paragraphs[].qas[] -> (context, question, first answer text),
//           id from qas[].id, else "<article>.<paragraph>.<qa>".
// boolq_jsonl: {question, passage, answer: bool}; pairs_jsonl: {context, question, answer}.
// JSON-Lines ids come from an "id" field, else the 0-based line number.
// All or nothing: any error discards the whole file.
std::vector<EvalExample> parse_qa_dataset(std::string_view bytes, DatasetFormat format,
                                          const std::string& path_label = "<memory>");
std::vector<EvalExample> load_qa_dataset(const std::filesystem::path& path, DatasetFormat format);

}  // namespace qgen::evalkit
