#include "xlt/eval/interpolate.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "xlt/errors.hpp"

namespace xlt::eval {

InterpolationResult interpolate(const std::vector<double>& dev_a,
                                const std::vector<double>& dev_b,
                                const std::vector<int>& dev_labels,
                                const std::vector<double>& test_a,
                                const std::vector<double>& test_b) {
  if (dev_a.size() != dev_b.size() || dev_a.size() != dev_labels.size())
    throw data_error("interpolate: dev scores and labels are not aligned");
  if (test_a.size() != test_b.size())
    throw data_error("interpolate: test score files are not aligned");
  if (dev_a.empty()) throw data_error("interpolate: empty dev set");

  double best_lambda = 0.0;
  std::int64_t best_correct = -1;
  for (int step = 0; step <= 100; ++step) {
    const double lambda = step / 100.0;
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < dev_a.size(); ++i) {
      const double p = lambda * dev_a[i] + (1.0 - lambda) * dev_b[i];
      const int pred = p > 0.5 ? 1 : 0;
      if (pred == dev_labels[i]) ++correct;
    }
    if (correct > best_correct) {  // strict: ties keep the smaller lambda
      best_correct = correct;
      best_lambda = lambda;
    }
  }

  InterpolationResult r;
  r.lambda = best_lambda;
  r.dev_accuracy = static_cast<double>(best_correct) / static_cast<double>(dev_a.size());
  r.combined_test.reserve(test_a.size());
  for (std::size_t i = 0; i < test_a.size(); ++i)
    r.combined_test.push_back(best_lambda * test_a[i] + (1.0 - best_lambda) * test_b[i]);
  return r;
}

std::vector<double> read_score_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw data_error("cannot read score file: " + file.string());
  std::vector<std::pair<std::int64_t, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw data_error(file.string() + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    if (!doc.contains("id") || !doc["id"].is_number_integer() || !doc.contains("p_positive") ||
        !doc["p_positive"].is_number())
      throw data_error(file.string() + ":" + std::to_string(lineno) +
                       ": expected {\"id\": int, \"p_positive\": float}");
    rows.emplace_back(doc["id"].get<std::int64_t>(), doc["p_positive"].get<double>());
  }
  std::sort(rows.begin(), rows.end());
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<std::int64_t>(i))
      throw data_error(file.string() + ": ids must be 0..N-1 without gaps or duplicates");
    scores.push_back(rows[i].second);
  }
  return scores;
}

void write_score_file(const std::vector<double>& scores, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw data_error("cannot write score file: " + file.string());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    nlohmann::json doc;
    doc["id"] = static_cast<std::int64_t>(i);
    doc["p_positive"] = scores[i];
    out << doc.dump() << '\n';
  }
}

}  // namespace xlt::eval
