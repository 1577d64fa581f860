#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xlt/model/config.hpp"
#include "xlt/model/gru.hpp"
#include "xlt/numcore/params.hpp"
#include "xlt/textpipe/encode.hpp"
#include "xlt/textpipe/vocab.hpp"

namespace xlt::model {

struct LanguagePack {
  std::string tag;
  textpipe::Vocabulary vocab;
};

// Uniform batch of token grids, ready for the encoder.
struct GridBatch {
  int batch = 0;
  int sentences = 0;
  int words = 0;
  std::vector<std::int32_t> ids;  // [batch, sentences, words] row-major

  static GridBatch from_grids(std::span<const textpipe::TokenGrid* const> grids);
  static GridBatch from_reviews(std::span<const textpipe::EncodedReview* const> reviews);
};

// Hierarchical GRU classifier with one embedding table per language and a
// shared encoder/prediction stack:
//   embed.<lang>   [vocab, d]
//   sent.*         sentence GRU, d -> h
//   review.*       review GRU, h -> d^T
//   pred.W [K,d^T], pred.b [K]
class TransferModel {
 public:
  ModelConfig cfg;
  numcore::ParamStore params;

  static TransferModel create(const ModelConfig& cfg, std::vector<LanguagePack> langs,
                              std::uint64_t seed);

  const std::vector<LanguagePack>& languages() const { return langs_; }
  bool has_language(const std::string& tag) const;
  const LanguagePack& language(const std::string& tag) const;

  // Registers one more language (fresh embedding table) on an existing model.
  void add_language(LanguagePack pack, std::uint64_t seed);

  static std::string embed_slot(const std::string& tag) { return "embed." + tag; }

 private:
  std::vector<LanguagePack> langs_;
  friend TransferModel assemble_model(ModelConfig, std::vector<LanguagePack>);
};

// Internal: builds the object without initializing parameters (checkpoint
// loading fills them afterwards).
TransferModel assemble_model(ModelConfig cfg, std::vector<LanguagePack> langs);

// Inference view of a model bound to one language's embedding table. The
// shared encoder and prediction parameters are the very same objects for
// every view: only the embedding lookup changes.
struct ModelView {
  const TransferModel* model = nullptr;
  std::string lang_tag;

  const textpipe::Vocabulary& vocab() const { return model->language(lang_tag).vocab; }
};

// The embedding swap: returns a view bound to `lang_tag`.
ModelView swap_embeddings(const TransferModel& model, const std::string& lang_tag);

// --- forward passes --------------------------------------------------------

// Encodes a grid batch into task representations [batch, d^T]: per sentence a
// GRU over word embeddings, dropout on the sentence vectors, a review-level
// GRU over those, dropout on its final state.
template <typename T>
Var encode_on_tape(Tape<T>& tape, BoundParams<T>& params, const ModelConfig& cfg,
                   const GridBatch& batch, const std::string& embed_slot, bool training,
                   numcore::Rng* dropout_rng);

// sigmoid(R w^T + b): probability of the positive class, [batch, 1].
template <typename T>
Var predict_binary_on_tape(Tape<T>& tape, BoundParams<T>& params, Var repr);

// Convenience: encode + binary prediction with training disabled.
std::vector<double> predict_batch(const ModelView& view,
                                  std::span<const textpipe::TokenGrid* const> grids);
std::vector<double> predict_reviews(const ModelView& view,
                                    const std::vector<textpipe::EncodedReview>& reviews);

// Task representations with training disabled, one row per grid.
numcore::Tensor represent_batch(const ModelView& view,
                                std::span<const textpipe::TokenGrid* const> grids);

}  // namespace xlt::model
