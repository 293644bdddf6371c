#pragma once

#include "qgen/common/error.hpp"
#include "qgen/evalkit/dataset.hpp"
#include "qgen/evalkit/metrics.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qgen::evalkit {

using ojson = nlohmann::ordered_json;

struct Prediction {
  std::string id;
  std::string question;
  std::string answer;
};

// Predictions read from a dataset file in any supported format.
std::vector<Prediction> predictions_from(const std::vector<EvalExample>& examples);

class AlignmentError : public Error {
 public:
  AlignmentError(std::vector<std::string> missing_predictions,
                 std::vector<std::string> unknown_predictions);
  // Reference ids with no prediction.
  const std::vector<std::string>& missing() const noexcept { return missing_; }
  // Prediction ids absent from the references.
  const std::vector<std::string>& unknown() const noexcept { return unknown_; }

 private:
  std::vector<std::string> missing_;
  std::vector<std::string> unknown_;
};

struct EvalResult {
  MetricReport questions;
  MetricReport answers;
};

// Pairs predictions with references by id (reference order) and scores the
// question and answer columns separately. Throws AlignmentError unless both id
// sets are equal; ValidationError on duplicate ids.
EvalResult evaluate_run(const std::vector<Prediction>& predictions,
                        const std::vector<EvalExample>& references, double rouge_beta = 1.0);

ojson to_json(const MetricReport& r);
ojson to_json(const EvalResult& r);

// Rows BLEU-4 and ROUGE-L; columns "Generated Questions" and "Generated Answers".
std::string render_table(const EvalResult& r);

// Four value columns: questions before/after, answers before/after; the JSON
// form also carries after - before deltas.
ojson comparison_json(const EvalResult& before, const EvalResult& after);
std::string render_comparison(const EvalResult& before, const EvalResult& after,
                              const std::string& label = "RL");

}  // namespace qgen::evalkit
