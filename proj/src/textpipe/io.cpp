#include "xlt/textpipe/io.hpp"

#include <fstream>

#include <json.hpp>

#include "xlt/errors.hpp"
#include "xlt/textpipe/tokenize.hpp"

namespace xlt::textpipe {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(const std::filesystem::path& file, std::size_t line,
                             const std::string& what) {
  throw data_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

LabeledFile read_labeled_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw data_error("cannot read labeled data file: " + file.string());
  LabeledFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(file, lineno, std::string("bad JSON: ") + e.what());
    }
    if (!doc.is_object()) line_error(file, lineno, "review must be a JSON object");
    const bool has_stars = doc.contains("stars");
    const bool has_label = doc.contains("label");
    if (has_stars == has_label)
      line_error(file, lineno, "exactly one of \"stars\" or \"label\" is required");
    if (!doc.contains("sentences") || !doc["sentences"].is_array())
      line_error(file, lineno, "\"sentences\" must be an array of strings");

    int label = -1;
    if (has_stars) {
      if (!doc["stars"].is_number()) line_error(file, lineno, "\"stars\" must be a number");
      std::optional<int> bin;
      try {
        bin = binarize_rating(doc["stars"].get<double>());
      } catch (const data_error& e) {
        line_error(file, lineno, e.what());
      }
      if (!bin) {
        ++out.skipped_neutral;
        continue;
      }
      label = *bin;
    } else {
      if (!doc["label"].is_number_integer()) line_error(file, lineno, "\"label\" must be 0 or 1");
      label = doc["label"].get<int>();
      if (label != 0 && label != 1) line_error(file, lineno, "\"label\" must be 0 or 1");
    }

    RawReview r;
    r.label = label;
    for (const auto& s : doc["sentences"]) {
      if (!s.is_string()) line_error(file, lineno, "\"sentences\" must contain only strings");
      r.sentences.push_back(tokenize(s.get<std::string>()));
    }
    out.reviews.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<std::string>> read_tokenized_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw data_error("cannot read text file: " + file.string());
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(tokenize(line));
  }
  return out;
}

ParallelFile read_parallel_text(const std::filesystem::path& source_file,
                                const std::filesystem::path& target_file) {
  ParallelFile out;
  out.source = read_tokenized_lines(source_file);
  out.target = read_tokenized_lines(target_file);
  if (out.source.size() != out.target.size())
    throw data_error("parallel files are misaligned: " + source_file.string() + " has " +
                     std::to_string(out.source.size()) + " lines, " + target_file.string() +
                     " has " + std::to_string(out.target.size()));
  return out;
}

std::vector<EncodedReview> encode_reviews(const std::vector<RawReview>& raw,
                                          const Vocabulary& vocab, int grid_sentences,
                                          int grid_words) {
  std::vector<EncodedReview> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    EncodedReview enc = encode_review(r.sentences, vocab, grid_sentences, grid_words);
    enc.label = r.label;
    out.push_back(std::move(enc));
  }
  return out;
}

}  // namespace xlt::textpipe
