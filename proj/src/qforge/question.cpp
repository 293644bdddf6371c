#include "qgen/qforge/question.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/text.hpp"

#include <algorithm>
#include <set>

namespace qgen::qforge {

std::string_view to_string(QType t) {
  switch (t) {
    case QType::mcq: return "mcq";
    case QType::truefalse: return "truefalse";
    case QType::fitb: return "fitb";
    case QType::matching: return "matching";
    case QType::visual: return "visual";
  }
  return "mcq";
}

QType qtype_from_string(std::string_view name) {
  if (name == "mcq") return QType::mcq;
  if (name == "truefalse" || name == "tf") return QType::truefalse;
  if (name == "fitb") return QType::fitb;
  if (name == "matching" || name == "match") return QType::matching;
  if (name == "visual") return QType::visual;
  throw ValidationError("unknown question type '" + std::string(name) + "'");
}

bool QuestionItem::has_flag(std::string_view f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::string QuestionItem::answer_text() const {
  switch (qtype) {
    case QType::mcq: {
      const std::size_t i = std::get<std::size_t>(answer_key);
      return i < options.size() ? options[i] : std::string();
    }
    case QType::truefalse:
      return std::get<bool>(answer_key) ? "true" : "false";
    case QType::fitb:
    case QType::visual:
      return std::get<std::string>(answer_key);
    case QType::matching: {
      const auto& key = std::get<std::vector<std::size_t>>(answer_key);
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < key.size() && i < matching.prompts.size(); ++i) {
        const std::string ans = key[i] < matching.answers.size() ? matching.answers[key[i]] : "";
        lines.push_back(matching.prompts[i] + " -> " + ans);
      }
      return text::join(lines, "; ");
    }
  }
  return {};
}

int GenerationSpec::count(QType t) const {
  auto it = counts.find(t);
  return it == counts.end() ? 0 : it->second;
}

void GenerationSpec::validate() const {
  for (const auto& [t, n] : counts) {
    if (n < 0) throw ValidationError("count for " + std::string(to_string(t)) + " must be >= 0");
  }
  if (K < 1) throw ValidationError("K must be >= 1");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (candidates_per_item < 1) throw ValidationError("candidates_per_item must be >= 1");
  if (matching_min_pairs < 2) throw ValidationError("matching_min_pairs must be >= 2");
  if (matching_pairs < matching_min_pairs) {
    throw ValidationError("matching_pairs must be >= matching_min_pairs");
  }
}

std::map<QType, int> parse_type_counts(std::string_view list) {
  std::map<QType, int> out;
  for (const auto& part : text::split_whitespace(std::string(list))) {
    std::size_t start = 0;
    while (start <= part.size()) {
      std::size_t comma = part.find(',', start);
      if (comma == std::string::npos) comma = part.size();
      const std::string item = part.substr(start, comma - start);
      start = comma + 1;
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ValidationError("expected type=count, got '" + item + "'");
      const QType t = qtype_from_string(item.substr(0, eq));
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError("bad count in '" + item + "'");
      }
      if (n < 0) throw ValidationError("count must be >= 0 in '" + item + "'");
      out[t] += n;
    }
  }
  return out;
}

const QuestionItem* Quiz::find_item(const std::string& item_id) const {
  for (const auto& item : items) {
    if (item.id == item_id) return &item;
  }
  return nullptr;
}

ojson to_json(const GenerationSpec& spec) {
  ojson types = ojson::object();
  for (QType t : kAllTypes) {
    if (spec.counts.count(t)) types[std::string(to_string(t))] = spec.count(t);
  }
  ojson j;
  j["types"] = types;
  j["K"] = spec.K;
  j["k"] = spec.k;
  j["candidates_per_item"] = spec.candidates_per_item;
  j["reward_filter"] = spec.reward_filter;
  j["seed"] = spec.seed;
  j["matching_pairs"] = spec.matching_pairs;
  j["matching_min_pairs"] = spec.matching_min_pairs;
  return j;
}

GenerationSpec spec_from_json(const ojson& j) {
  if (!j.is_object()) throw ValidationError("generation spec must be a JSON object");
  static const std::set<std::string> known = {"types", "K", "k", "candidates_per_item", "reward_filter",
                                              "seed", "matching_pairs", "matching_min_pairs"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown generation spec field '" + key + "'");
  }
  GenerationSpec s;
  try {
    if (j.contains("types")) {
      if (!j["types"].is_object()) throw ValidationError("'types' must map type names to counts");
      for (const auto& [name, n] : j["types"].items()) {
        if (!n.is_number_integer()) throw ValidationError("count for '" + name + "' must be an integer");
        s.counts[qtype_from_string(name)] += n.get<int>();
      }
    }
    s.K = j.value("K", s.K);
    s.k = j.value("k", s.k);
    s.candidates_per_item = j.value("candidates_per_item", s.candidates_per_item);
    s.reward_filter = j.value("reward_filter", s.reward_filter);
    s.seed = j.value("seed", s.seed);
    s.matching_pairs = j.value("matching_pairs", s.matching_pairs);
    s.matching_min_pairs = j.value("matching_min_pairs", s.matching_min_pairs);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid generation spec: ") + e.what());
  }
  s.validate();
  return s;
}

ojson to_json(const QuestionItem& item, bool include_key) {
  ojson j;
  j["id"] = item.id;
  j["qtype"] = to_string(item.qtype);
  j["stem"] = item.stem;
  if (item.qtype == QType::matching) {
    j["options"] = {{"prompts", item.matching.prompts}, {"answers", item.matching.answers}};
  } else {
    j["options"] = item.options;
  }
  if (include_key) {
    std::visit([&](const auto& v) { j["answer_key"] = v; }, item.answer_key);
  }
  j["source_chunks"] = item.source_chunks;
  j["doc_id"] = item.doc_id;
  j["locator"] = item.locator.to_json();
  j["traceback"] = item.locator.render();
  j["flags"] = item.flags;
  if (!item.note.empty()) j["note"] = item.note;
  if (item.reward_score) j["reward_score"] = *item.reward_score;
  return j;
}

QuestionItem item_from_json(const ojson& j) {
  QuestionItem item;
  item.id = j.at("id").get<std::string>();
  item.qtype = qtype_from_string(j.at("qtype").get<std::string>());
  item.stem = j.at("stem").get<std::string>();
  if (item.qtype == QType::matching) {
    item.matching.prompts = j.at("options").at("prompts").get<std::vector<std::string>>();
    item.matching.answers = j.at("options").at("answers").get<std::vector<std::string>>();
  } else {
    item.options = j.at("options").get<std::vector<std::string>>();
  }
  if (j.contains("answer_key")) {
    const ojson& k = j["answer_key"];
    switch (item.qtype) {
      case QType::mcq: item.answer_key = k.get<std::size_t>(); break;
      case QType::truefalse: item.answer_key = k.get<bool>(); break;
      case QType::fitb:
      case QType::visual: item.answer_key = k.get<std::string>(); break;
      case QType::matching: item.answer_key = k.get<std::vector<std::size_t>>(); break;
    }
  }
  item.source_chunks = j.at("source_chunks").get<std::vector<std::string>>();
  item.doc_id = j.value("doc_id", "");
  if (j.contains("locator")) item.locator = chunkstore::Locator::from_json(j["locator"]);
  item.flags = j.value("flags", std::vector<std::string>{});
  item.note = j.value("note", "");
  if (j.contains("reward_score")) item.reward_score = j["reward_score"].get<double>();
  return item;
}

ojson to_json(const Quiz& quiz, bool include_keys) {
  ojson j;
  j["id"] = quiz.id;
  j["doc_id"] = quiz.doc_id;
  j["seed"] = quiz.seed;
  j["created_at"] = quiz.created_at;
  j["spec"] = to_json(quiz.spec);
  ojson items = ojson::array();
  for (const auto& item : quiz.items) items.push_back(to_json(item, include_keys));
  j["items"] = std::move(items);
  ojson shortfall = ojson::object();
  for (const auto& [t, n] : quiz.shortfall) shortfall[std::string(to_string(t))] = n;
  j["shortfall"] = std::move(shortfall);
  return j;
}

Quiz quiz_from_json(const ojson& j) {
  Quiz q;
  try {
    q.id = j.at("id").get<std::string>();
    q.doc_id = j.at("doc_id").get<std::string>();
    q.seed = j.at("seed").get<std::uint64_t>();
    q.created_at = j.value("created_at", "");
    q.spec = spec_from_json(j.at("spec"));
    for (const auto& item : j.at("items")) q.items.push_back(item_from_json(item));
    if (j.contains("shortfall")) {
      for (const auto& [name, n] : j["shortfall"].items()) q.shortfall[qtype_from_string(name)] = n.get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid quiz document: ") + e.what());
  }
  return q;
}

std::string serialize(const Quiz& quiz) { return to_json(quiz).dump(2) + "\n"; }

}  // namespace qgen::qforge
