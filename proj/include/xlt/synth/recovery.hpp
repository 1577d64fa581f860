#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "xlt/model/model.hpp"
#include "xlt/synth/generator.hpp"

namespace xlt::synth {

struct RecoveryScore {
  double polarity_agreement = 0.0;  // words whose top-k neighbors majority-share the class
  double exact_match = 0.0;         // words whose top-1 neighbor is the true cipher image
  int words_scored = 0;
};

// Scores cross-lingual word association against the generator's ground
// truth. Takes the `word_budget` most frequent polarity-bearing source words
// (frequency ties break lexicographically), finds their top-k target
// neighbors by embedding cosine, and reports:
//   - the fraction whose neighbor majority (> k/2) shares the word's polarity
//   - the fraction whose nearest neighbor is the exact cipher image.
RecoveryScore score_neighbor_recovery(
    const model::TransferModel& model, const std::string& source_lang,
    const std::string& target_lang, const std::vector<CipherEntry>& truth,
    const std::unordered_map<std::string, std::int64_t>& source_frequencies, int top_k,
    int word_budget);

// Token frequencies over a labeled corpus, for the budget selection.
std::unordered_map<std::string, std::int64_t> token_frequencies(
    const std::vector<LabeledDoc>& docs);

}  // namespace xlt::synth
