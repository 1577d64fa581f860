#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xlt::synth {

// Desk-scale bilingual benchmark: a source "language" whose sentiment is
// carried by dedicated polarity tokens, and a target language produced by a
// word-level substitution cipher with optional per-occurrence noise. The
// cipher gives a known ground truth for transfer and word-association
// claims.
struct SynthSpec {
  int vocab_size = 200;       // total source tokens
  int positive_words = 30;
  int negative_words = 30;    // the rest of the vocabulary is neutral filler
  int min_sentences = 4;      // per review
  int max_sentences = 6;
  int min_words = 6;          // per sentence
  int max_words = 8;
  double polarity_ratio = 0.2;  // chance a word slot carries polarity (1:4)
  double noise = 0.0;           // chance a cipher image is replaced by a confounder
  int labeled = 2000;           // training reviews
  int parallel = 3000;          // parallel sentence pairs
  int test = 500;               // reviews per test set (source and target)
  std::uint64_t seed = 1;

  void validate() const;
};

enum class Polarity { positive, negative, neutral };

struct CipherEntry {
  std::string source;
  std::string target;
  Polarity polarity = Polarity::neutral;
};

struct LabeledDoc {
  std::vector<std::vector<std::string>> sentences;
  int label = 0;
  int stars = 0;  // label re-expressed as a 1/2 or 4/5 star rating
};

struct GeneratedCorpus {
  std::vector<LabeledDoc> train;
  std::vector<LabeledDoc> source_test;
  std::vector<LabeledDoc> target_test;
  std::vector<std::string> parallel_source;  // one sentence per line
  std::vector<std::string> parallel_target;
  std::vector<CipherEntry> cipher;
};

// Pure function of the spec (seed included).
GeneratedCorpus generate(const SynthSpec& spec);

// Writes the corpus in the pipeline's file formats:
//   train.jsonl, source_test.jsonl, target_test.jsonl   (labeled JSON lines,
//     star ratings)
//   parallel.src.txt, parallel.tgt.txt                  (aligned text)
//   cipher_map.tsv                                      (source, target, polarity)
struct CorpusFiles {
  std::filesystem::path train;
  std::filesystem::path source_test;
  std::filesystem::path target_test;
  std::filesystem::path parallel_source;
  std::filesystem::path parallel_target;
  std::filesystem::path cipher_map;
};
CorpusFiles corpus_files(const std::filesystem::path& dir);
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir);

std::vector<CipherEntry> read_cipher_map(const std::filesystem::path& file);

const char* polarity_name(Polarity p);

}  // namespace xlt::synth
