#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xlt/textpipe/encode.hpp"

namespace xlt::textpipe {

// One labeled review after tokenization and rating binarization.
struct RawReview {
  std::vector<std::vector<std::string>> sentences;
  int label = -1;
};

struct LabeledFile {
  std::vector<RawReview> reviews;
  std::int64_t skipped_neutral = 0;  // 3-star lines excluded by binarization
};

// JSON-lines reader. Each line holds one review:
//   {"stars": <1-5>, "sentences": ["...", ...]}  or
//   {"label": 0|1,   "sentences": ["...", ...]}
// Exactly one of stars/label must be present. Sentences are tokenized here.
LabeledFile read_labeled_jsonl(const std::filesystem::path& file);

// Two aligned plain-text files, one sentence per line; returns tokenized
// sentences and verifies the line counts match.
struct ParallelFile {
  std::vector<std::vector<std::string>> source;
  std::vector<std::vector<std::string>> target;
};
ParallelFile read_parallel_text(const std::filesystem::path& source_file,
                                const std::filesystem::path& target_file);

// Plain sentence-per-line reader used for vocabulary building over
// parallel corpora.
std::vector<std::vector<std::string>> read_tokenized_lines(const std::filesystem::path& file);

std::vector<EncodedReview> encode_reviews(const std::vector<RawReview>& raw,
                                          const Vocabulary& vocab, int grid_sentences,
                                          int grid_words);

}  // namespace xlt::textpipe
