#include "xlt/textpipe/vocab.hpp"

#include <algorithm>
#include <fstream>

#include "xlt/errors.hpp"

namespace xlt::textpipe {

const std::string& Vocabulary::token(int id) const {
  static const std::string pad = kPadToken;
  static const std::string unk = kUnkToken;
  if (id == kPad) return pad;
  if (id == kUnk) return unk;
  const int i = id - 2;
  if (i < 0 || i >= static_cast<int>(tokens_.size()))
    throw data_error("vocabulary id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(i)];
}

void Vocabulary::add(const std::string& token) {
  if (token.empty()) throw data_error("empty token cannot enter a vocabulary");
  if (index_.count(token)) throw data_error("duplicate vocabulary token: " + token);
  index_.emplace(token, static_cast<int>(tokens_.size()) + 2);
  tokens_.push_back(token);
}

void Vocabulary::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw data_error("cannot write vocabulary file: " + file.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& file, std::string lang_tag) {
  std::ifstream in(file);
  if (!in) throw data_error("cannot read vocabulary file: " + file.string());
  Vocabulary v(std::move(lang_tag));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw data_error("blank line in vocabulary file: " + file.string());
    v.add(line);
  }
  return v;
}

Vocabulary VocabBuilder::build(std::string lang_tag, int min_count, int max_size) const {
  if (min_count < 1) throw config_error("vocabulary min_count must be >= 1");
  if (max_size < 2) throw config_error("vocabulary max_size must fit PAD and UNK");
  if (counts_.empty()) throw data_error("cannot build a vocabulary from an empty corpus");

  std::vector<std::pair<std::string, std::int64_t>> ranked;
  ranked.reserve(counts_.size());
  for (const auto& [token, count] : counts_)
    if (count >= min_count) ranked.emplace_back(token, count);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  const std::size_t capacity = static_cast<std::size_t>(max_size) - 2;
  if (ranked.size() > capacity) ranked.resize(capacity);

  Vocabulary v(std::move(lang_tag));
  for (const auto& [token, count] : ranked) v.add(token);
  return v;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences,
                       std::string lang_tag, int min_count, int max_size) {
  VocabBuilder b;
  for (const auto& s : sentences) b.add_sentence(s);
  return b.build(std::move(lang_tag), min_count, max_size);
}

}  // namespace xlt::textpipe
