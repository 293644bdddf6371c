#include "qgen/evalkit/metrics.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qgen::evalkit {

Tokens tokenize_eval(std::string_view input) {
  const std::string folded = text::fold_case(input);
  Tokens out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  std::size_t pos = 0;
  while (pos < folded.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::next_codepoint(folded, pos);
    if (text::is_space(cp)) {
      flush();
    } else if (text::is_alnum(cp)) {
      word.append(folded, start, pos - start);
    } else {
      flush();
      out.emplace_back(folded.substr(start, pos - start));
    }
  }
  flush();
  return out;
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> count_ngrams(const Tokens& t, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    ++counts[Ngram(t.begin() + static_cast<std::ptrdiff_t>(i),
                   t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::vector<Tokens> tokenize_all(std::span<const std::string> texts) {
  std::vector<Tokens> out;
  out.reserve(texts.size());
  for (const auto& s : texts) out.push_back(tokenize_eval(s));
  return out;
}

}  // namespace

MetricReport bleu4_corpus(std::span<const Tokens> candidates, std::span<const Tokens> references) {
  if (candidates.size() != references.size()) {
    throw ValidationError("bleu4_corpus: " + std::to_string(candidates.size()) +
                          " candidates vs " + std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) throw ValidationError("bleu4_corpus: at least one pair is required");

  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  MetricReport rep;
  rep.n_examples = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Tokens& cand = candidates[i];
    const Tokens& ref = references[i];
    rep.candidate_length += cand.size();
    rep.reference_length += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      if (cand.size() < n) continue;
      totals[n - 1] += cand.size() - n + 1;
      const auto ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : count_ngrams(cand, n)) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  bool all_positive = true;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    rep.precision[n] = totals[n] == 0 ? 0.0
                                      : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    if (rep.precision[n] > 0.0) {
      log_sum += std::log(rep.precision[n]);
    } else {
      all_positive = false;
    }
  }

  const double c = static_cast<double>(rep.candidate_length);
  const double r = static_cast<double>(rep.reference_length);
  if (rep.candidate_length > rep.reference_length) {
    rep.brevity_penalty = 1.0;
  } else if (rep.candidate_length == 0) {
    rep.brevity_penalty = 0.0;
  } else {
    rep.brevity_penalty = std::exp(1.0 - r / c);
  }
  rep.bleu4 = all_positive ? rep.brevity_penalty * std::exp(log_sum / 4.0) : 0.0;
  rep.bleu4 = std::clamp(rep.bleu4, 0.0, 1.0);
  return rep;
}

MetricReport bleu4_corpus(std::span<const std::string> candidates,
                          std::span<const std::string> references) {
  const auto c = tokenize_all(candidates);
  const auto r = tokenize_all(references);
  return bleu4_corpus(std::span<const Tokens>(c), std::span<const Tokens>(r));
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference,
               double beta) {
  RougeL out;
  if (candidate.empty() || reference.empty()) return out;
  const double l = static_cast<double>(lcs_length(candidate, reference));
  out.precision = l / static_cast<double>(candidate.size());
  out.recall = l / static_cast<double>(reference.size());
  if (out.precision + out.recall == 0.0) return out;
  const double b2 = beta * beta;
  out.f = (1.0 + b2) * out.precision * out.recall / (out.recall + b2 * out.precision);
  return out;
}

RougeL rouge_l(std::string_view candidate, std::string_view reference, double beta) {
  const Tokens c = tokenize_eval(candidate);
  const Tokens r = tokenize_eval(reference);
  return rouge_l(std::span<const std::string>(c), std::span<const std::string>(r), beta);
}

MetricReport score_corpus(std::span<const std::string> candidates,
                          std::span<const std::string> references, double rouge_beta) {
  const auto c = tokenize_all(candidates);
  const auto r = tokenize_all(references);
  MetricReport rep = bleu4_corpus(std::span<const Tokens>(c), std::span<const Tokens>(r));
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    sum += rouge_l(std::span<const std::string>(c[i]), std::span<const std::string>(r[i]), rouge_beta).f;
  }
  rep.rouge_l_f1 = sum / static_cast<double>(c.size());
  return rep;
}

}  // namespace qgen::evalkit
