#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace xlt::textpipe {

// Bidirectional token <-> id map for one language. Ids are dense; 0 and 1
// are reserved for PAD and UNK, everything else is ranked by corpus
// frequency (ties broken lexicographically).
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  explicit Vocabulary(std::string lang_tag = "") : lang_tag_(std::move(lang_tag)) {}

  const std::string& lang_tag() const { return lang_tag_; }

  // Total entries including PAD/UNK.
  int size() const { return static_cast<int>(tokens_.size()) + 2; }

  // Token -> id; unknown tokens map to kUnk.
  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }

  // Id -> token; reserved ids decode to their marker strings.
  const std::string& token(int id) const;

  // Non-reserved tokens in id order (index i holds id i+2).
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Appends one token with the next free id; rejects duplicates and markers.
  void add(const std::string& token);

  void save(const std::filesystem::path& file) const;
  static Vocabulary load(const std::filesystem::path& file, std::string lang_tag);

 private:
  std::string lang_tag_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Frequency-based construction. Tokens seen fewer than min_count times are
// dropped; the rest are ranked by count (descending) then token
// (ascending) and truncated so the vocabulary, PAD/UNK included, has at
// most max_size entries.
class VocabBuilder {
 public:
  void add(const std::string& token) { ++counts_[token]; }
  void add_sentence(const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) add(t);
  }
  bool empty() const { return counts_.empty(); }

  Vocabulary build(std::string lang_tag, int min_count = 2, int max_size = 50000) const;

 private:
  std::unordered_map<std::string, std::int64_t> counts_;
};

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences,
                       std::string lang_tag, int min_count = 2, int max_size = 50000);

}  // namespace xlt::textpipe
