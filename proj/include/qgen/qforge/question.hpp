#pragma once

#include "qgen/chunkstore/chunk.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qgen::qforge {

using ojson = nlohmann::ordered_json;

enum class QType { mcq, truefalse, fitb, matching, visual };

inline constexpr QType kAllTypes[] = {QType::mcq, QType::truefalse, QType::fitb, QType::matching,
                                      QType::visual};

std::string_view to_string(QType t);
// Accepts the canonical names plus the short forms "tf" and "match".
QType qtype_from_string(std::string_view name);

inline constexpr std::string_view kBlank = "______";

struct MatchingColumns {
  std::vector<std::string> prompts;  // original order
  std::vector<std::string> answers;  // shuffled
  bool operator==(const MatchingColumns&) const = default;
};

// mcq: index of the correct option; truefalse: bool; fitb and visual: text;
// matching: for prompt i, the index into the shuffled answer column.
using AnswerKey = std::variant<std::size_t, bool, std::string, std::vector<std::size_t>>;

struct QuestionItem {
  std::string id;
  QType qtype = QType::mcq;
  std::string stem;
  std::vector<std::string> options;  // mcq
  MatchingColumns matching;          // matching
  AnswerKey answer_key;
  std::vector<std::string> source_chunks;
  std::string doc_id;
  chunkstore::Locator locator;  // first source chunk's locator
  std::vector<std::string> flags;
  std::string note;  // provenance, e.g. the diagram description
  std::optional<double> reward_score;

  bool has_flag(std::string_view f) const;
  // The answer rendered as text (the option for mcq, "true"/"false", ...).
  std::string answer_text() const;
  bool operator==(const QuestionItem&) const = default;
};

struct GenerationSpec {
  std::map<QType, int> counts;
  std::size_t K = 10;  // key terms extracted
  std::size_t k = 3;   // retrieval depth per key term
  int candidates_per_item = 1;
  bool reward_filter = false;
  std::uint64_t seed = 0;
  std::size_t matching_pairs = 4;
  std::size_t matching_min_pairs = 3;

  int count(QType t) const;
  void validate() const;  // throws ValidationError
};

// Parses "mcq=2,tf=2,fitb=2,match=1".
std::map<QType, int> parse_type_counts(std::string_view list);

struct Quiz {
  std::string id;
  std::string doc_id;
  std::uint64_t seed = 0;
  std::string created_at;
  GenerationSpec spec;
  std::vector<QuestionItem> items;
  std::map<QType, int> shortfall;

  const QuestionItem* find_item(const std::string& item_id) const;
};

ojson to_json(const GenerationSpec& spec);
GenerationSpec spec_from_json(const ojson& j);

// include_key = false drops answer_key (and the matching key) for delivery to
// quiz takers.
ojson to_json(const QuestionItem& item, bool include_key = true);
QuestionItem item_from_json(const ojson& j);

ojson to_json(const Quiz& quiz, bool include_keys = true);
Quiz quiz_from_json(const ojson& j);

// Stable pretty-printed form used for files in the store.
std::string serialize(const Quiz& quiz);

}  // namespace qgen::qforge
