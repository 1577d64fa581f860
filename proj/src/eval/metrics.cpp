#include "xlt/eval/metrics.hpp"

#include <cstdio>

#include "xlt/errors.hpp"

namespace xlt::eval {

double f1_from_pr(double precision, double recall) {
  if (precision <= 0.0 && recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

EvalReport EvalReport::from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn,
                                   std::int64_t fn) {
  if (tp < 0 || fp < 0 || tn < 0 || fn < 0) throw data_error("negative confusion counts");
  const std::int64_t total = tp + fp + tn + fn;
  if (total == 0) throw data_error("empty confusion matrix");
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  // Single division keeps the identity exact on integer counts.
  r.f1 = 2 * tp + fp + fn == 0
             ? 0.0
             : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  return r;
}

std::string EvalReport::csv() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "tp,fp,tn,fn,precision,recall,f1,accuracy\n%lld,%lld,%lld,%lld,%.6f,%.6f,%.6f,%.6f\n",
                static_cast<long long>(tp), static_cast<long long>(fp),
                static_cast<long long>(tn), static_cast<long long>(fn), precision, recall, f1,
                accuracy);
  return buf;
}

std::string EvalReport::pretty() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "tp=%lld fp=%lld tn=%lld fn=%lld\nprecision=%.4f recall=%.4f f1=%.4f accuracy=%.4f\n",
                static_cast<long long>(tp), static_cast<long long>(fp),
                static_cast<long long>(tn), static_cast<long long>(fn), precision, recall, f1,
                accuracy);
  return buf;
}

std::vector<double> predict_probabilities(const model::ModelView& view,
                                          const std::vector<textpipe::EncodedReview>& test) {
  constexpr std::size_t kChunk = 64;
  std::vector<double> probs;
  probs.reserve(test.size());
  for (std::size_t begin = 0; begin < test.size(); begin += kChunk) {
    const std::size_t end = std::min(begin + kChunk, test.size());
    std::vector<const textpipe::TokenGrid*> grids;
    grids.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) grids.push_back(&test[i].grid);
    const auto chunk = model::predict_batch(view, grids);
    probs.insert(probs.end(), chunk.begin(), chunk.end());
  }
  return probs;
}

EvalReport evaluate(const model::ModelView& view,
                    const std::vector<textpipe::EncodedReview>& test) {
  if (test.empty()) throw data_error("evaluate: empty test set");
  const std::vector<double> probs = predict_probabilities(view, test);
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int label = test[i].label;
    if (label != 0 && label != 1) throw data_error("evaluate: test example without a label");
    const int pred = probs[i] > 0.5 ? 1 : 0;
    if (pred == 1 && label == 1) ++tp;
    else if (pred == 1 && label == 0) ++fp;
    else if (pred == 0 && label == 0) ++tn;
    else ++fn;
  }
  return EvalReport::from_counts(tp, fp, tn, fn);
}

}  // namespace xlt::eval
