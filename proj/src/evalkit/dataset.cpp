#include "qgen/evalkit/dataset.hpp"

#include "qgen/chunkstore/store.hpp"

#include <json.hpp>

namespace qgen::evalkit {

using json = nlohmann::json;

std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::squad_v1: return "squad_v1";
    case DatasetFormat::boolq_jsonl: return "boolq_jsonl";
    case DatasetFormat::pairs_jsonl: return "pairs_jsonl";
  }
  return "squad_v1";
}

DatasetFormat dataset_format_from_string(std::string_view name) {
  if (name == "squad_v1") return DatasetFormat::squad_v1;
  if (name == "boolq_jsonl") return DatasetFormat::boolq_jsonl;
  if (name == "pairs_jsonl") return DatasetFormat::pairs_jsonl;
  throw ValidationError("unknown dataset format '" + std::string(name) +
                        "' (expected squad_v1, boolq_jsonl or pairs_jsonl)");
}

std::string answer_text(const RefAnswer& a) {
  if (const bool* b = std::get_if<bool>(&a)) return *b ? "true" : "false";
  return std::get<std::string>(a);
}

namespace {

const json& require(const json& obj, const char* key, const std::string& path,
                    const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw DatasetError(path, where, std::string("missing field '") + key + "'");
  }
  return obj[key];
}

std::string require_string(const json& obj, const char* key, const std::string& path,
                           const std::string& where) {
  const json& v = require(obj, key, path, where);
  if (!v.is_string()) {
    throw DatasetError(path, where + "/" + key, "expected a string");
  }
  return v.get<std::string>();
}

std::string id_or(const json& obj, const std::string& fallback) {
  if (!obj.contains("id")) return fallback;
  const json& v = obj["id"];
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void check_question(const EvalExample& ex, const std::string& path, const std::string& where) {
  if (ex.reference_question.empty()) throw DatasetError(path, where, "question is empty");
}

std::vector<EvalExample> parse_squad(std::string_view bytes, const std::string& path) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw DatasetError(path, "byte " + std::to_string(e.byte), e.what());
  }
  std::vector<EvalExample> out;
  const json& data = require(doc, "data", path, "");
  if (!data.is_array()) throw DatasetError(path, "/data", "expected an array");
  for (std::size_t a = 0; a < data.size(); ++a) {
    const std::string wa = "/data/" + std::to_string(a);
    const json& paragraphs = require(data[a], "paragraphs", path, wa);
    if (!paragraphs.is_array()) throw DatasetError(path, wa + "/paragraphs", "expected an array");
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
      const std::string wp = wa + "/paragraphs/" + std::to_string(p);
      const std::string context = require_string(paragraphs[p], "context", path, wp);
      const json& qas = require(paragraphs[p], "qas", path, wp);
      if (!qas.is_array()) throw DatasetError(path, wp + "/qas", "expected an array");
      for (std::size_t q = 0; q < qas.size(); ++q) {
        const std::string wq = wp + "/qas/" + std::to_string(q);
        EvalExample ex;
        ex.id = id_or(qas[q], std::to_string(a) + "." + std::to_string(p) + "." + std::to_string(q));
        ex.context = context;
        ex.reference_question = require_string(qas[q], "question", path, wq);
        const json& answers = require(qas[q], "answers", path, wq);
        if (!answers.is_array()) throw DatasetError(path, wq + "/answers", "expected an array");
        ex.reference_answer = answers.empty()
                                  ? std::string()
                                  : require_string(answers[0], "text", path, wq + "/answers/0");
        check_question(ex, path, wq + "/question");
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

std::vector<EvalExample> parse_jsonl(std::string_view bytes, DatasetFormat format,
                                     const std::string& path) {
  std::vector<EvalExample> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    const std::string_view line = bytes.substr(start, end - start);
    const std::size_t index = line_no++;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = "line " + std::to_string(index + 1);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(path, where, e.what());
    }
    if (!row.is_object()) throw DatasetError(path, where, "expected a JSON object");

    EvalExample ex;
    ex.id = id_or(row, std::to_string(index));
    ex.reference_question = require_string(row, "question", path, where);
    if (format == DatasetFormat::boolq_jsonl) {
      ex.context = require_string(row, "passage", path, where);
      const json& ans = require(row, "answer", path, where);
      if (!ans.is_boolean()) throw DatasetError(path, where + "/answer", "expected a boolean");
      ex.reference_answer = ans.get<bool>();
    } else {
      ex.context = require_string(row, "context", path, where);
      ex.reference_answer = require_string(row, "answer", path, where);
    }
    check_question(ex, path, where);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

std::vector<EvalExample> parse_qa_dataset(std::string_view bytes, DatasetFormat format,
                                          const std::string& path_label) {
  if (format == DatasetFormat::squad_v1) return parse_squad(bytes, path_label);
  return parse_jsonl(bytes, format, path_label);
}

std::vector<EvalExample> load_qa_dataset(const std::filesystem::path& path, DatasetFormat format) {
  return parse_qa_dataset(chunkstore::read_file(path), format, path.string());
}

}  // namespace qgen::evalkit
