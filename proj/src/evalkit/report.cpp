#include "qgen/evalkit/report.hpp"

#include "qgen/common/text.hpp"

#include <cstdio>
#include <map>
#include <set>

namespace qgen::evalkit {

std::vector<Prediction> predictions_from(const std::vector<EvalExample>& examples) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back({ex.id, ex.reference_question, answer_text(ex.reference_answer)});
  }
  return out;
}

namespace {

std::string describe_alignment(const std::vector<std::string>& missing,
                               const std::vector<std::string>& unknown) {
  std::string msg = "predictions and references are not aligned";
  if (!missing.empty()) msg += "; missing predictions for ids: " + text::join(missing, ", ");
  if (!unknown.empty()) msg += "; predictions with unknown ids: " + text::join(unknown, ", ");
  return msg;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string render_rows(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += "  ";
      out += c + 1 == cells.size() ? cells[c] : pad(cells[c], width[c]);
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.emplace_back(w, '-');
  out += line(rule);
  for (const auto& r : rows) out += line(r);
  return out;
}

}  // namespace

AlignmentError::AlignmentError(std::vector<std::string> missing, std::vector<std::string> unknown)
    : Error(ErrorKind::alignment, describe_alignment(missing, unknown)),
      missing_(std::move(missing)),
      unknown_(std::move(unknown)) {}

EvalResult evaluate_run(const std::vector<Prediction>& predictions,
                        const std::vector<EvalExample>& references, double rouge_beta) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw ValidationError("duplicate prediction id '" + p.id + "'");
    }
  }
  std::set<std::string> ref_ids;
  std::vector<std::string> missing;
  for (const auto& r : references) {
    if (!ref_ids.insert(r.id).second) throw ValidationError("duplicate reference id '" + r.id + "'");
    if (!by_id.count(r.id)) missing.push_back(r.id);
  }
  std::vector<std::string> unknown;
  for (const auto& p : predictions) {
    if (!ref_ids.count(p.id)) unknown.push_back(p.id);
  }
  if (!missing.empty() || !unknown.empty()) throw AlignmentError(missing, unknown);
  if (references.empty()) throw ValidationError("no examples to evaluate");

  std::vector<std::string> cand_q, ref_q, cand_a, ref_a;
  for (const auto& r : references) {
    const Prediction& p = *by_id.at(r.id);
    cand_q.push_back(p.question);
    ref_q.push_back(r.reference_question);
    cand_a.push_back(p.answer);
    ref_a.push_back(answer_text(r.reference_answer));
  }
  EvalResult out;
  out.questions = score_corpus(cand_q, ref_q, rouge_beta);
  out.answers = score_corpus(cand_a, ref_a, rouge_beta);
  return out;
}

ojson to_json(const MetricReport& r) {
  ojson j;
  j["bleu4"] = r.bleu4;
  j["rouge_l_f1"] = r.rouge_l_f1;
  j["precision"] = r.precision;
  j["brevity_penalty"] = r.brevity_penalty;
  j["candidate_length"] = r.candidate_length;
  j["reference_length"] = r.reference_length;
  j["n_examples"] = r.n_examples;
  return j;
}

ojson to_json(const EvalResult& r) {
  ojson j;
  j["questions"] = to_json(r.questions);
  j["answers"] = to_json(r.answers);
  return j;
}

std::string render_table(const EvalResult& r) {
  return render_rows({"Metric", "Generated Questions", "Generated Answers"},
                     {{"BLEU-4", fmt4(r.questions.bleu4), fmt4(r.answers.bleu4)},
                      {"ROUGE-L", fmt4(r.questions.rouge_l_f1), fmt4(r.answers.rouge_l_f1)}});
}

ojson comparison_json(const EvalResult& before, const EvalResult& after) {
  auto row = [](double qb, double qa, double ab, double aa) {
    ojson j;
    j["questions_before"] = qb;
    j["questions_after"] = qa;
    j["answers_before"] = ab;
    j["answers_after"] = aa;
    j["questions_delta"] = qa - qb;
    j["answers_delta"] = aa - ab;
    return j;
  };
  ojson j;
  j["bleu4"] = row(before.questions.bleu4, after.questions.bleu4, before.answers.bleu4,
                   after.answers.bleu4);
  j["rouge_l"] = row(before.questions.rouge_l_f1, after.questions.rouge_l_f1,
                     before.answers.rouge_l_f1, after.answers.rouge_l_f1);
  return j;
}

std::string render_comparison(const EvalResult& before, const EvalResult& after,
                              const std::string& label) {
  const std::string b = " Before " + label;
  const std::string a = " After " + label;
  return render_rows(
      {"Metric", "Questions" + b, "Questions" + a, "Answers" + b, "Answers" + a},
      {{"BLEU-4", fmt4(before.questions.bleu4), fmt4(after.questions.bleu4),
        fmt4(before.answers.bleu4), fmt4(after.answers.bleu4)},
       {"ROUGE-L", fmt4(before.questions.rouge_l_f1), fmt4(after.questions.rouge_l_f1),
        fmt4(before.answers.rouge_l_f1), fmt4(after.answers.rouge_l_f1)}});
}

}  // namespace qgen::evalkit
