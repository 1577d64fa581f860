#include "xlt/eval/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "xlt/errors.hpp"

namespace xlt::eval {

double cosine_similarity(const float* a, const float* b, int dim) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < dim; ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Neighbor> neighbors(const model::TransferModel& model, const std::string& query,
                                const std::string& source_lang, const std::string& target_lang,
                                int k) {
  if (k < 1) throw config_error("neighbors: k must be at least 1");
  const auto& src_vocab = model.language(source_lang).vocab;
  const auto& tgt_vocab = model.language(target_lang).vocab;
  if (!src_vocab.contains(query))
    throw data_error("neighbors: token '" + query + "' is not in the " + source_lang +
                     " vocabulary");

  const auto& src_table = model.params.at(model::TransferModel::embed_slot(source_lang)).value;
  const auto& tgt_table = model.params.at(model::TransferModel::embed_slot(target_lang)).value;
  const int dim = src_table.dim(1);
  const float* q = src_table.data() + static_cast<std::size_t>(src_vocab.id(query)) * dim;

  std::vector<std::pair<double, int>> scored;  // (similarity, target id)
  scored.reserve(static_cast<std::size_t>(tgt_vocab.size()));
  for (int id = 2; id < tgt_vocab.size(); ++id)
    scored.emplace_back(
        cosine_similarity(q, tgt_table.data() + static_cast<std::size_t>(id) * dim, dim), id);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    out.push_back(Neighbor{tgt_vocab.token(scored[i].second), scored[i].first});
  return out;
}

}  // namespace xlt::eval
