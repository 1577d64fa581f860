#include "xlt/synth/recovery.hpp"

#include <algorithm>

#include "xlt/errors.hpp"
#include "xlt/eval/neighbors.hpp"

namespace xlt::synth {

std::unordered_map<std::string, std::int64_t> token_frequencies(
    const std::vector<LabeledDoc>& docs) {
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& doc : docs)
    for (const auto& sentence : doc.sentences)
      for (const auto& word : sentence) ++freq[word];
  return freq;
}

RecoveryScore score_neighbor_recovery(
    const model::TransferModel& model, const std::string& source_lang,
    const std::string& target_lang, const std::vector<CipherEntry>& truth,
    const std::unordered_map<std::string, std::int64_t>& source_frequencies, int top_k,
    int word_budget) {
  if (top_k < 1 || word_budget < 1)
    throw config_error("neighbor recovery needs top_k >= 1 and word_budget >= 1");
  model.language(target_lang);  // missing table -> config_error
  const auto& src_vocab = model.language(source_lang).vocab;

  std::unordered_map<std::string, const CipherEntry*> by_source;
  std::unordered_map<std::string, Polarity> target_polarity;
  for (const auto& e : truth) {
    by_source.emplace(e.source, &e);
    target_polarity.emplace(e.target, e.polarity);
  }

  // Budget = most frequent polarity words present in the model vocabulary.
  std::vector<std::pair<std::int64_t, std::string>> candidates;
  for (const auto& e : truth) {
    if (e.polarity == Polarity::neutral) continue;
    if (!src_vocab.contains(e.source)) continue;
    auto it = source_frequencies.find(e.source);
    const std::int64_t freq = it == source_frequencies.end() ? 0 : it->second;
    candidates.emplace_back(freq, e.source);
  }
  if (candidates.empty())
    throw data_error("neighbor recovery: no polarity words available to score");
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(candidates.size()) > word_budget)
    candidates.resize(static_cast<std::size_t>(word_budget));

  int agree = 0, exact = 0;
  for (const auto& [freq, word] : candidates) {
    const CipherEntry& entry = *by_source.at(word);
    const auto nn = eval::neighbors(model, word, source_lang, target_lang, top_k);
    int same_class = 0;
    for (const auto& n : nn) {
      auto it = target_polarity.find(n.token);
      const Polarity p = it == target_polarity.end() ? Polarity::neutral : it->second;
      if (p == entry.polarity) ++same_class;
    }
    if (2 * same_class > static_cast<int>(nn.size())) ++agree;
    if (!nn.empty() && nn.front().token == entry.target) ++exact;
  }

  RecoveryScore score;
  score.words_scored = static_cast<int>(candidates.size());
  score.polarity_agreement = static_cast<double>(agree) / score.words_scored;
  score.exact_match = static_cast<double>(exact) / score.words_scored;
  return score;
}

}  // namespace xlt::synth
