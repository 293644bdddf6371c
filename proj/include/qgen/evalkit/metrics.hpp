#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qgen::evalkit {

using Tokens = std::vector<std::string>;

// Case-folds, splits on whitespace and emits every code point that is neither
// alphanumeric nor whitespace as a token of its own.
Tokens tokenize_eval(std::string_view text);

struct MetricReport {
  double bleu4 = 0.0;
  double rouge_l_f1 = 0.0;  // mean over pairs
  std::array<double, 4> precision{};  // p_1 .. p_4
  double brevity_penalty = 0.0;
  std::size_t candidate_length = 0;  // c
  std::size_t reference_length = 0;  // r
  std::size_t n_examples = 0;
};

// Corpus-level BLEU-4 with a single reference per candidate and no smoothing.
// p_n = sum of clipped n-gram matches / sum of candidate n-grams;
// BP = 1 if c > r, 0 if c = 0, else exp(1 - r/c);
// bleu4 = BP * exp(mean ln p_n) when every p_n > 0, else 0.
// Throws ValidationError on length mismatch or empty input. rouge_l_f1 is left 0.
MetricReport bleu4_corpus(std::span<const Tokens> candidates, std::span<const Tokens> references);
MetricReport bleu4_corpus(std::span<const std::string> candidates,
                          std::span<const std::string> references);

struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// P = L/|cand|, R = L/|ref|, F = (1+b^2)PR / (R + b^2 P); 0 when either side is empty
// or P + R = 0. beta = 1 gives F1.
RougeL rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference,
               double beta = 1.0);
RougeL rouge_l(std::string_view candidate, std::string_view reference, double beta = 1.0);

// bleu4_corpus plus the mean ROUGE-L F over the pairs.
MetricReport score_corpus(std::span<const std::string> candidates,
                          std::span<const std::string> references, double rouge_beta = 1.0);

}  // namespace qgen::evalkit
