#include "xlt/model/model.hpp"

#include <algorithm>

#include "xlt/errors.hpp"

namespace xlt::model {

using numcore::Rng;
using numcore::Tensor;
using numcore::TensorT;

GridBatch GridBatch::from_grids(std::span<const textpipe::TokenGrid* const> grids) {
  if (grids.empty()) throw data_error("empty grid batch");
  GridBatch b;
  b.batch = static_cast<int>(grids.size());
  b.sentences = grids[0]->sentences;
  b.words = grids[0]->words;
  b.ids.reserve(static_cast<std::size_t>(b.batch) * b.sentences * b.words);
  for (const auto* g : grids) {
    if (g->sentences != b.sentences || g->words != b.words)
      throw dim_error("grid batch mixes grid shapes");
    b.ids.insert(b.ids.end(), g->ids.begin(), g->ids.end());
  }
  return b;
}

GridBatch GridBatch::from_reviews(std::span<const textpipe::EncodedReview* const> reviews) {
  std::vector<const textpipe::TokenGrid*> grids;
  grids.reserve(reviews.size());
  for (const auto* r : reviews) grids.push_back(&r->grid);
  return from_grids(grids);
}

TransferModel assemble_model(ModelConfig cfg, std::vector<LanguagePack> langs) {
  TransferModel m;
  m.cfg = cfg;
  m.langs_ = std::move(langs);
  return m;
}

namespace {

// Every slot draws from its own stream keyed by name, so the presence or
// order of language tables never shifts another slot's initial values.
Rng slot_rng(std::uint64_t seed, const std::string& slot_name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : slot_name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Rng::derive(seed, numcore::stream::kModelInit, h);
}

void add_gru_params_seeded(numcore::ParamStore& store, const std::string& prefix,
                           GruShape shape, std::uint64_t seed) {
  for (const auto& name : gru_param_names(prefix)) {
    Rng rng = slot_rng(seed, name);
    const char kind = name[name.size() - 2];  // 'W', 'U' or 'b'
    if (kind == 'W')
      store.add(name, numcore::glorot_tensor<float>({shape.input, shape.hidden}, shape.input,
                                                    shape.hidden, rng));
    else if (kind == 'U')
      store.add(name, numcore::glorot_tensor<float>({shape.hidden, shape.hidden}, shape.hidden,
                                                    shape.hidden, rng));
    else
      store.add(name, Tensor({shape.hidden}));
  }
}

}  // namespace

TransferModel TransferModel::create(const ModelConfig& cfg, std::vector<LanguagePack> langs,
                                    std::uint64_t seed) {
  if (cfg.embed_dim < 1 || cfg.sent_hidden < 1 || cfg.repr_dim < 1 || cfg.classes < 1)
    throw config_error("model dimensions must be positive");
  if (langs.empty()) throw config_error("model needs at least one language");

  TransferModel m = assemble_model(cfg, std::move(langs));
  // Embedding rows in +/-0.05; every language table shares the dimension d.
  for (const auto& lang : m.langs_) {
    Rng rng = slot_rng(seed, embed_slot(lang.tag));
    m.params.add(embed_slot(lang.tag),
                 numcore::uniform_tensor<float>({lang.vocab.size(), cfg.embed_dim}, -0.05, 0.05,
                                                rng));
  }
  add_gru_params_seeded(m.params, "sent", {cfg.embed_dim, cfg.sent_hidden}, seed);
  add_gru_params_seeded(m.params, "review", {cfg.sent_hidden, cfg.repr_dim}, seed);
  Rng pred_rng = slot_rng(seed, "pred.W");
  m.params.add("pred.W",
               numcore::glorot_tensor<float>({cfg.classes, cfg.repr_dim}, cfg.repr_dim,
                                             cfg.classes, pred_rng));
  m.params.add("pred.b", Tensor({cfg.classes}));
  return m;
}

bool TransferModel::has_language(const std::string& tag) const {
  return std::any_of(langs_.begin(), langs_.end(),
                     [&](const LanguagePack& l) { return l.tag == tag; });
}

const LanguagePack& TransferModel::language(const std::string& tag) const {
  for (const auto& l : langs_)
    if (l.tag == tag) return l;
  throw config_error("model has no language table for tag '" + tag + "'");
}

void TransferModel::add_language(LanguagePack pack, std::uint64_t seed) {
  if (has_language(pack.tag)) throw config_error("language already present: " + pack.tag);
  Rng rng = slot_rng(seed, embed_slot(pack.tag));
  params.add(embed_slot(pack.tag),
             numcore::uniform_tensor<float>({pack.vocab.size(), cfg.embed_dim}, -0.05, 0.05,
                                            rng));
  langs_.push_back(std::move(pack));
}

ModelView swap_embeddings(const TransferModel& model, const std::string& lang_tag) {
  if (!model.has_language(lang_tag))
    throw config_error("cannot swap embeddings: no table for language '" + lang_tag + "'");
  return ModelView{&model, lang_tag};
}

template <typename T>
Var encode_on_tape(Tape<T>& tape, BoundParams<T>& params, const ModelConfig& cfg,
                   const GridBatch& batch, const std::string& embed_slot, bool training,
                   numcore::Rng* dropout_rng) {
  const int B = batch.batch, S = batch.sentences, W = batch.words;
  if (B < 1 || S < 1 || W < 1) throw dim_error("encode: empty batch");

  Var table = params[embed_slot];
  const int rows = B * S;

  GruVars<T> sent = GruVars<T>::bind(params, "sent");
  GruVars<T> review = GruVars<T>::bind(params, "review");

  // Sentence level: all B*S sentences advance in lockstep over W tokens.
  Var h_sent = tape.input(TensorT<T>({rows, cfg.sent_hidden}));
  std::vector<int> ids_t(static_cast<std::size_t>(rows));
  for (int t = 0; t < W; ++t) {
    for (int r = 0; r < rows; ++r)
      ids_t[static_cast<std::size_t>(r)] =
          batch.ids[static_cast<std::size_t>(r) * W + t];
    Var x = tape.gather_rows(table, ids_t);
    h_sent = gru_step_on_tape(tape, sent, x, h_sent);
  }
  h_sent = tape.dropout(h_sent, cfg.dropout, training, dropout_rng);

  // Review level: step s gathers every batch element's s-th sentence vector.
  Var h_rev = tape.input(TensorT<T>({B, cfg.repr_dim}));
  std::vector<int> row_of(static_cast<std::size_t>(B));
  for (int s = 0; s < S; ++s) {
    for (int b = 0; b < B; ++b) row_of[static_cast<std::size_t>(b)] = b * S + s;
    Var x = tape.gather_rows(h_sent, row_of);
    h_rev = gru_step_on_tape(tape, review, x, h_rev);
  }
  return tape.dropout(h_rev, cfg.dropout, training, dropout_rng);
}

template Var encode_on_tape<float>(Tape<float>&, BoundParams<float>&, const ModelConfig&,
                                   const GridBatch&, const std::string&, bool, numcore::Rng*);
template Var encode_on_tape<double>(Tape<double>&, BoundParams<double>&, const ModelConfig&,
                                    const GridBatch&, const std::string&, bool, numcore::Rng*);

template <typename T>
Var predict_binary_on_tape(Tape<T>& tape, BoundParams<T>& params, Var repr) {
  return tape.sigmoid(tape.add_rowvec(tape.matmul_transposed(repr, params["pred.W"]),
                                      params["pred.b"]));
}

template Var predict_binary_on_tape<float>(Tape<float>&, BoundParams<float>&, Var);
template Var predict_binary_on_tape<double>(Tape<double>&, BoundParams<double>&, Var);

std::vector<double> predict_batch(const ModelView& view,
                                  std::span<const textpipe::TokenGrid* const> grids) {
  const GridBatch batch = GridBatch::from_grids(grids);
  const Tensor probs = numcore::forward_values<float>(
      view.model->params, [&](Tape<float>& t, BoundParams<float>& p) {
        Var r = encode_on_tape(t, p, view.model->cfg, batch,
                               TransferModel::embed_slot(view.lang_tag), false, nullptr);
        return predict_binary_on_tape(t, p, r);
      });
  std::vector<double> out(probs.vec().begin(), probs.vec().end());
  return out;
}

std::vector<double> predict_reviews(const ModelView& view,
                                    const std::vector<textpipe::EncodedReview>& reviews) {
  std::vector<const textpipe::TokenGrid*> grids;
  grids.reserve(reviews.size());
  for (const auto& r : reviews) grids.push_back(&r.grid);
  return predict_batch(view, grids);
}

numcore::Tensor represent_batch(const ModelView& view,
                                std::span<const textpipe::TokenGrid* const> grids) {
  const GridBatch batch = GridBatch::from_grids(grids);
  return numcore::forward_values<float>(
      view.model->params, [&](Tape<float>& t, BoundParams<float>& p) {
        return encode_on_tape(t, p, view.model->cfg, batch,
                              TransferModel::embed_slot(view.lang_tag), false, nullptr);
      });
}

}  // namespace xlt::model
