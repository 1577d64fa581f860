#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xlt/numcore/rng.hpp"
#include "xlt/textpipe/vocab.hpp"

namespace xlt::textpipe {

// Fixed S x W grid of token ids, row-major. Positions past the original
// sentence/word counts hold PAD.
struct TokenGrid {
  int sentences = 0;
  int words = 0;
  std::vector<std::int32_t> ids;

  std::int32_t at(int s, int w) const {
    return ids[static_cast<std::size_t>(s) * words + w];
  }
};

struct EncodedReview {
  TokenGrid grid;
  int label = -1;  // 0 or 1 once assigned
  int orig_sentence_count = 0;
  std::vector<int> orig_word_counts;  // for the kept sentences
};

// Aligned pair of grids built from a contiguous run of sentence pairs.
struct ParallelParagraph {
  TokenGrid source;
  TokenGrid target;
  int group_size = 0;  // raw sentence pairs consumed
};

struct CorpusStats {
  std::int64_t review_count = 0;
  std::int64_t parallel_count = 0;
  std::int64_t positive_count = 0;
  std::int64_t negative_count = 0;
  int source_vocab_size = 0;
  int target_vocab_size = 0;
};

// Encodes tokenized sentences onto a fixed S x W grid: first S sentences,
// first W tokens of each, OOV -> UNK, remainder PAD.
EncodedReview encode_review(const std::vector<std::vector<std::string>>& sentences,
                            const Vocabulary& vocab, int grid_sentences, int grid_words);

// Star-rating binarization: >3 positive, <3 negative, ==3 excluded.
// Ratings outside [1,5] are a data error.
std::optional<int> binarize_rating(double stars);

// Batches a line-aligned sentence-pair stream into pseudo paragraphs of
// 15..30 contiguous pairs (final partial group kept when at least one pair
// remains). Each side is encoded to its own grid independently.
std::vector<ParallelParagraph> batch_pseudo_paragraphs(
    const std::vector<std::vector<std::string>>& source_sentences,
    const std::vector<std::vector<std::string>>& target_sentences,
    const Vocabulary& source_vocab, const Vocabulary& target_vocab, numcore::Rng& rng,
    int grid_sentences, int grid_words, int group_min = 15, int group_max = 30);

// Same, with an injectable group-size source (used by tests to force sizes).
std::vector<ParallelParagraph> batch_pseudo_paragraphs_with_sizes(
    const std::vector<std::vector<std::string>>& source_sentences,
    const std::vector<std::vector<std::string>>& target_sentences,
    const Vocabulary& source_vocab, const Vocabulary& target_vocab,
    const std::function<int()>& next_group_size, int grid_sentences, int grid_words);

}  // namespace xlt::textpipe
