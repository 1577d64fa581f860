#include "xlt/synth/generator.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "xlt/errors.hpp"
#include "xlt/numcore/rng.hpp"

namespace xlt::synth {

namespace {

using numcore::Rng;

struct Lexicon {
  std::vector<std::string> positive, negative, neutral;  // source surface forms
  std::vector<std::string> target_of;                    // cipher, by source index
  std::vector<std::string> all_source;
  std::vector<Polarity> polarity_of;  // by source index
  std::unordered_map<std::string, int> index;

  int index_of(const std::string& token) const { return index.at(token); }
};

Lexicon build_lexicon(const SynthSpec& spec) {
  Lexicon lex;
  for (int i = 0; i < spec.positive_words; ++i) lex.positive.push_back("pos" + std::to_string(i));
  for (int i = 0; i < spec.negative_words; ++i) lex.negative.push_back("neg" + std::to_string(i));
  const int neutral = spec.vocab_size - spec.positive_words - spec.negative_words;
  for (int i = 0; i < neutral; ++i) lex.neutral.push_back("w" + std::to_string(i));

  for (const auto& t : lex.positive) {
    lex.all_source.push_back(t);
    lex.polarity_of.push_back(Polarity::positive);
  }
  for (const auto& t : lex.negative) {
    lex.all_source.push_back(t);
    lex.polarity_of.push_back(Polarity::negative);
  }
  for (const auto& t : lex.neutral) {
    lex.all_source.push_back(t);
    lex.polarity_of.push_back(Polarity::neutral);
  }

  for (std::size_t i = 0; i < lex.all_source.size(); ++i)
    lex.index.emplace(lex.all_source[i], static_cast<int>(i));

  // Target surface forms are a seeded permutation so the cipher is not
  // readable off the token names.
  std::vector<int> perm(lex.all_source.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  Rng cipher_rng = Rng::derive(spec.seed, numcore::stream::kSynthCipher, 0);
  cipher_rng.shuffle(perm);
  lex.target_of.resize(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    lex.target_of[i] = "t" + std::to_string(perm[i]);
  return lex;
}

std::vector<std::string> sample_sentence(const SynthSpec& spec, const Lexicon& lex,
                                         Polarity mode, Rng& rng) {
  const int n_words = rng.uniform_int(spec.min_words, spec.max_words);
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(n_words));
  for (int w = 0; w < n_words; ++w) {
    const bool polar = mode != Polarity::neutral && rng.uniform() < spec.polarity_ratio;
    if (polar) {
      const auto& pool = mode == Polarity::positive ? lex.positive : lex.negative;
      words.push_back(pool[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(pool.size()) - 1))]);
    } else {
      words.push_back(lex.neutral[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(lex.neutral.size()) - 1))]);
    }
  }
  return words;
}

LabeledDoc sample_doc(const SynthSpec& spec, const Lexicon& lex, Rng& rng) {
  LabeledDoc doc;
  doc.label = rng.uniform() < 0.5 ? 1 : 0;
  doc.stars = doc.label == 1 ? rng.uniform_int(4, 5) : rng.uniform_int(1, 2);
  const Polarity mode = doc.label == 1 ? Polarity::positive : Polarity::negative;
  const int n_sentences = rng.uniform_int(spec.min_sentences, spec.max_sentences);
  for (int s = 0; s < n_sentences; ++s)
    doc.sentences.push_back(sample_sentence(spec, lex, mode, rng));
  return doc;
}

std::string cipher_sentence(const std::vector<std::string>& source, const SynthSpec& spec,
                            const Lexicon& lex, Rng& rng) {
  std::ostringstream out;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const int idx = lex.index_of(source[i]);
    std::string image = lex.target_of[static_cast<std::size_t>(idx)];
    if (spec.noise > 0.0 && rng.uniform() < spec.noise) {
      // Confounder: any target token other than the true image.
      int other = idx;
      while (other == idx)
        other = rng.uniform_int(0, static_cast<int>(lex.target_of.size()) - 1);
      image = lex.target_of[static_cast<std::size_t>(other)];
    }
    if (i) out << ' ';
    out << image;
  }
  return out.str();
}

LabeledDoc to_target(const LabeledDoc& doc, const Lexicon& lex) {
  LabeledDoc out = doc;
  for (auto& sentence : out.sentences)
    for (auto& word : sentence)
      word = lex.target_of[static_cast<std::size_t>(lex.index_of(word))];
  return out;
}

void write_jsonl(const std::vector<LabeledDoc>& docs, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw data_error("cannot write " + file.string());
  for (const auto& doc : docs) {
    nlohmann::json j;
    j["stars"] = doc.stars;
    j["sentences"] = nlohmann::json::array();
    for (const auto& sentence : doc.sentences) {
      std::ostringstream joined;
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (i) joined << ' ';
        joined << sentence[i];
      }
      j["sentences"].push_back(joined.str());
    }
    out << j.dump() << '\n';
  }
}

void write_lines(const std::vector<std::string>& lines, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw data_error("cannot write " + file.string());
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace

void SynthSpec::validate() const {
  if (vocab_size < 3) throw config_error("synth: vocab_size must be at least 3");
  if (positive_words < 1 || negative_words < 1)
    throw config_error("synth: polarity lexicons must be non-empty");
  if (positive_words + negative_words >= vocab_size)
    throw config_error("synth: lexicon sizes must leave room for neutral filler");
  if (min_sentences < 1 || max_sentences < min_sentences)
    throw config_error("synth: bad sentence count range");
  if (min_words < 1 || max_words < min_words) throw config_error("synth: bad word count range");
  if (polarity_ratio < 0.0 || polarity_ratio > 1.0)
    throw config_error("synth: polarity_ratio must be in [0,1]");
  if (noise < 0.0 || noise >= 1.0) throw config_error("synth: noise must be in [0,1)");
  if (labeled < 1 || parallel < 1 || test < 1)
    throw config_error("synth: corpus sizes must be positive");
}

const char* polarity_name(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    default: return "neutral";
  }
}

GeneratedCorpus generate(const SynthSpec& spec) {
  spec.validate();
  const Lexicon lex = build_lexicon(spec);
  GeneratedCorpus corpus;

  for (std::size_t i = 0; i < lex.all_source.size(); ++i)
    corpus.cipher.push_back(CipherEntry{lex.all_source[i], lex.target_of[i],
                                        lex.polarity_of[i]});

  Rng doc_rng = Rng::derive(spec.seed, numcore::stream::kSynthDoc, 0);
  for (int i = 0; i < spec.labeled; ++i) corpus.train.push_back(sample_doc(spec, lex, doc_rng));

  Rng test_rng = Rng::derive(spec.seed, numcore::stream::kSynthDoc, 1);
  for (int i = 0; i < spec.test; ++i)
    corpus.source_test.push_back(sample_doc(spec, lex, test_rng));

  // Target test reviews are native target-language text: generated in source
  // token space, then mapped through the noise-free cipher.
  Rng target_rng = Rng::derive(spec.seed, numcore::stream::kSynthDoc, 2);
  for (int i = 0; i < spec.test; ++i)
    corpus.target_test.push_back(to_target(sample_doc(spec, lex, target_rng), lex));

  // Parallel sentences carry a latent polarity that persists over contiguous
  // runs (topical coherence), so pseudo paragraphs lean one way without
  // being pure.
  Rng par_rng = Rng::derive(spec.seed, numcore::stream::kSynthParallel, 0);
  Polarity mode = Polarity::positive;
  for (int i = 0; i < spec.parallel; ++i) {
    if (i == 0 || par_rng.uniform() >= 0.8)
      mode = par_rng.uniform() < 0.5 ? Polarity::positive : Polarity::negative;
    const auto sentence = sample_sentence(spec, lex, mode, par_rng);
    std::ostringstream src;
    for (std::size_t w = 0; w < sentence.size(); ++w) {
      if (w) src << ' ';
      src << sentence[w];
    }
    corpus.parallel_source.push_back(src.str());
    corpus.parallel_target.push_back(cipher_sentence(sentence, spec, lex, par_rng));
  }
  return corpus;
}

CorpusFiles corpus_files(const std::filesystem::path& dir) {
  return CorpusFiles{dir / "train.jsonl",        dir / "source_test.jsonl",
                     dir / "target_test.jsonl",  dir / "parallel.src.txt",
                     dir / "parallel.tgt.txt",   dir / "cipher_map.tsv"};
}

void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const CorpusFiles files = corpus_files(dir);
  write_jsonl(corpus.train, files.train);
  write_jsonl(corpus.source_test, files.source_test);
  write_jsonl(corpus.target_test, files.target_test);
  write_lines(corpus.parallel_source, files.parallel_source);
  write_lines(corpus.parallel_target, files.parallel_target);

  std::ofstream map(files.cipher_map);
  if (!map) throw data_error("cannot write " + files.cipher_map.string());
  for (const auto& e : corpus.cipher)
    map << e.source << '\t' << e.target << '\t' << polarity_name(e.polarity) << '\n';
}

std::vector<CipherEntry> read_cipher_map(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw data_error("cannot read cipher map: " + file.string());
  std::vector<CipherEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    CipherEntry e;
    std::string polarity;
    if (!std::getline(row, e.source, '\t') || !std::getline(row, e.target, '\t') ||
        !std::getline(row, polarity))
      throw data_error(file.string() + ":" + std::to_string(lineno) + ": bad cipher row");
    if (polarity == "positive") e.polarity = Polarity::positive;
    else if (polarity == "negative") e.polarity = Polarity::negative;
    else if (polarity == "neutral") e.polarity = Polarity::neutral;
    else
      throw data_error(file.string() + ":" + std::to_string(lineno) + ": bad polarity " +
                       polarity);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace xlt::synth
