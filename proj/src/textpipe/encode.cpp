#include "xlt/textpipe/encode.hpp"

#include <algorithm>

#include "xlt/errors.hpp"

namespace xlt::textpipe {

namespace {

TokenGrid encode_grid(const std::vector<std::vector<std::string>>& sentences,
                      const Vocabulary& vocab, int grid_sentences, int grid_words) {
  TokenGrid g;
  g.sentences = grid_sentences;
  g.words = grid_words;
  g.ids.assign(static_cast<std::size_t>(grid_sentences) * grid_words, Vocabulary::kPad);
  const int keep_s = std::min<int>(grid_sentences, static_cast<int>(sentences.size()));
  for (int s = 0; s < keep_s; ++s) {
    const auto& sent = sentences[static_cast<std::size_t>(s)];
    const int keep_w = std::min<int>(grid_words, static_cast<int>(sent.size()));
    for (int w = 0; w < keep_w; ++w)
      g.ids[static_cast<std::size_t>(s) * grid_words + w] =
          vocab.id(sent[static_cast<std::size_t>(w)]);
  }
  return g;
}

}  // namespace

EncodedReview encode_review(const std::vector<std::vector<std::string>>& sentences,
                            const Vocabulary& vocab, int grid_sentences, int grid_words) {
  if (grid_sentences < 1 || grid_words < 1)
    throw config_error("grid dimensions must be at least 1x1");
  EncodedReview r;
  r.grid = encode_grid(sentences, vocab, grid_sentences, grid_words);
  r.orig_sentence_count = static_cast<int>(sentences.size());
  const int keep_s = std::min<int>(grid_sentences, r.orig_sentence_count);
  for (int s = 0; s < keep_s; ++s)
    r.orig_word_counts.push_back(static_cast<int>(sentences[static_cast<std::size_t>(s)].size()));
  return r;
}

std::optional<int> binarize_rating(double stars) {
  if (stars < 1.0 || stars > 5.0)
    throw data_error("star rating out of range [1,5]: " + std::to_string(stars));
  if (stars > 3.0) return 1;
  if (stars < 3.0) return 0;
  return std::nullopt;  // 3-star reviews belong to neither class
}

std::vector<ParallelParagraph> batch_pseudo_paragraphs_with_sizes(
    const std::vector<std::vector<std::string>>& source_sentences,
    const std::vector<std::vector<std::string>>& target_sentences,
    const Vocabulary& source_vocab, const Vocabulary& target_vocab,
    const std::function<int()>& next_group_size, int grid_sentences, int grid_words) {
  if (source_sentences.size() != target_sentences.size())
    throw data_error("parallel streams are misaligned: " +
                     std::to_string(source_sentences.size()) + " vs " +
                     std::to_string(target_sentences.size()) + " sentences");
  std::vector<ParallelParagraph> out;
  std::size_t pos = 0;
  while (pos < source_sentences.size()) {
    const int wanted = next_group_size();
    if (wanted < 1) throw config_error("paragraph group size must be positive");
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(wanted), source_sentences.size() - pos);
    std::vector<std::vector<std::string>> src(source_sentences.begin() + pos,
                                              source_sentences.begin() + pos + k);
    std::vector<std::vector<std::string>> tgt(target_sentences.begin() + pos,
                                              target_sentences.begin() + pos + k);
    ParallelParagraph p;
    p.source = encode_grid(src, source_vocab, grid_sentences, grid_words);
    p.target = encode_grid(tgt, target_vocab, grid_sentences, grid_words);
    p.group_size = static_cast<int>(k);
    out.push_back(std::move(p));
    pos += k;
  }
  return out;
}

std::vector<ParallelParagraph> batch_pseudo_paragraphs(
    const std::vector<std::vector<std::string>>& source_sentences,
    const std::vector<std::vector<std::string>>& target_sentences,
    const Vocabulary& source_vocab, const Vocabulary& target_vocab, numcore::Rng& rng,
    int grid_sentences, int grid_words, int group_min, int group_max) {
  if (group_min < 1 || group_max < group_min)
    throw config_error("invalid paragraph group bounds");
  return batch_pseudo_paragraphs_with_sizes(
      source_sentences, target_sentences, source_vocab, target_vocab,
      [&rng, group_min, group_max] { return rng.uniform_int(group_min, group_max); },
      grid_sentences, grid_words);
}

}  // namespace xlt::textpipe
