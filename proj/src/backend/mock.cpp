#include "qgen/backend/mock.hpp"

#include "qgen/chunkstore/ingest.hpp"
#include "qgen/common/hash.hpp"
#include "qgen/common/text.hpp"
#include "qgen/keyterm/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qgen::backend {

namespace {

std::vector<std::string> sentences_of(const std::string& context) {
  std::string cleaned;
  try {
    cleaned = chunkstore::clean_text(context);
  } catch (const Error&) {
    cleaned = context;
  }
  return chunkstore::segment_sentences(cleaned);
}

std::string first_sentence(const std::string& context) {
  auto s = sentences_of(context);
  return s.empty() ? text::trim(context) : s.front();
}

std::string strip_terminal_punct(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) s.pop_back();
  return text::trim(s);
}

// Unigrams of a single passage ranked by tf-idf (idf is constant for a single
// chunk, so this is term frequency), ties lexicographic.
std::vector<std::string> ranked_unigrams(const std::string& context) {
  chunkstore::Chunk c;
  c.id = "ctx";
  c.text = context;
  const keyterm::TfIdfModel model = keyterm::build_tfidf(std::span(&c, 1));
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& term : model.vocab()) {
    if (term.find(' ') != std::string::npos) continue;
    scored.emplace_back(model.tfidf(term, 0), term);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (auto& [_, t] : scored) out.push_back(std::move(t));
  return out;
}

std::size_t variant_of(const json& p) {
  return p.contains("variant") ? p["variant"].get<std::size_t>() : 0;
}

std::string image_name(const json& p) {
  if (p.contains("image_ref") && p["image_ref"].is_string()) return p["image_ref"].get<std::string>();
  return "inline image";
}

std::set<std::string> token_set(const std::string& s) {
  std::set<std::string> out;
  for (auto& t : keyterm::tokenize_terms(s)) out.insert(std::move(t.text));
  return out;
}

}  // namespace

const VqgPrompts& vqg_prompts() {
  static const VqgPrompts prompts{
      "<image> Generate a full description about this diagram.",
      "<image> Generate a question on this chart.",
      "We input the question for the model to answer",
  };
  return prompts;
}

json mock_respond(std::string_view op, const json& payload, std::uint64_t seed) {
  return mock_respond(op_from_string(op), payload, seed);
}

json mock_respond(Op op, const json& p, std::uint64_t seed) {
  validate_request(op, p);
  json r = json::object();
  switch (op) {
    case Op::qa: {
      const std::string context = p["context"].get<std::string>();
      const auto words = ranked_unigrams(context);
      const std::string subject =
          words.empty() ? std::string("this passage") : words[variant_of(p) % words.size()];
      r["question"] = "What is stated about " + subject + "?";
      r["answer"] = first_sentence(context);
      break;
    }
    case Op::distractors: {
      const auto toks = keyterm::tokenize_terms(p["answer"].get<std::string>());
      const std::string head = toks.empty() ? std::string("answer") : toks.front().text;
      json list = json::array();
      const long n = p["n"].get<long>();
      for (long i = 1; i <= n; ++i) list.push_back("distractor-" + std::to_string(i) + "-" + head);
      r["distractors"] = std::move(list);
      break;
    }
    case Op::boolq: {
      const std::string context = p["context"].get<std::string>();
      const auto sents = sentences_of(context);
      const std::string s = sents.empty() ? text::trim(context)
                                          : sents[variant_of(p) % sents.size()];
      r["question"] = "Is the following stated: " + strip_terminal_punct(s) + "?";
      r["answer"] = true;
      break;
    }
    case Op::classify: {
      const bool diagram = p.contains("image_ref") && p["image_ref"].is_string() &&
                           p["image_ref"].get<std::string>().find("diagram") != std::string::npos;
      r["label"] = diagram ? "diagram" : "none";
      r["confidence"] = 0.99;
      break;
    }
    case Op::vqg: {
      const std::string name = image_name(p);
      const std::string mode = p["mode"].get<std::string>();
      if (mode == "describe") {
        r["text"] = "A diagram (" + name + ") showing labelled components and their connections.";
      } else if (mode == "ask") {
        r["text"] = "What relationship does the diagram " + name + " show?";
      } else {
        r["text"] = "According to " + name + ": " + p["question"].get<std::string>();
      }
      break;
    }
    case Op::embed: {
      json vectors = json::array();
      for (const auto& t : p["texts"]) {
        std::uint64_t seed_state = seed;
        std::uint64_t state = fnv1a64(t.get<std::string>()) ^ splitmix64(seed_state);
        std::vector<double> v(kEmbedDim);
        double sq = 0.0;
        for (double& x : v) {
          // 53 high bits mapped to [-1, 1).
          x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
          sq += x * x;
        }
        const double norm = std::sqrt(sq);
        for (double& x : v) x /= norm;
        vectors.push_back(v);
      }
      r["vectors"] = std::move(vectors);
      break;
    }
    case Op::transcribe: {
      json seg = json::object();
      seg["start_s"] = 0.0;
      seg["end_s"] = 1.0;
      seg["text"] = "stub transcript of " + p["audio_ref"].get<std::string>();
      r["segments"] = json::array();
      r["segments"].push_back(std::move(seg));
      break;
    }
    case Op::reward: {
      const auto q = token_set(p["question"].get<std::string>());
      const auto c = token_set(p["context"].get<std::string>());
      std::size_t shared = 0;
      for (const auto& t : q) shared += c.count(t);
      const double ratio = q.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(q.size());
      r["score"] = std::clamp(ratio, 0.0, 1.0);
      break;
    }
  }
  return r;
}

}  // namespace qgen::backend
