#include "xlt/model/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "xlt/errors.hpp"

namespace xlt::model {

namespace {

using numcore::Tensor;

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.write(buf, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.write(buf, 8);
}

void put_f32(std::ostream& out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.write(buf, 4);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw checkpoint_error(checkpoint_fault::truncated, "checkpoint file is truncated");
  }

  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  float f32() {
    float v;
    bytes(&v, 4);
    return v;
  }
  std::string string(std::uint32_t max_len = 1u << 20) {
    const std::uint32_t n = u32();
    if (n > max_len)
      throw checkpoint_error(checkpoint_fault::inconsistent, "unreasonable string length");
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }

 private:
  std::istream& in_;
};

struct ParsedHeader {
  RawCheckpoint raw;
  std::vector<std::vector<std::string>> lang_tokens;
};

ParsedHeader parse(std::istream& in, bool keep_payload) {
  Reader r(in);
  ParsedHeader h;

  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw checkpoint_error(checkpoint_fault::bad_magic, "not a model checkpoint (bad magic)");
  h.raw.version = r.u32();
  if (h.raw.version != kCheckpointVersion)
    throw checkpoint_error(checkpoint_fault::bad_version,
                           "unsupported checkpoint version " + std::to_string(h.raw.version));

  ModelConfig& cfg = h.raw.cfg;
  cfg.embed_dim = static_cast<int>(r.u32());
  cfg.sent_hidden = static_cast<int>(r.u32());
  cfg.repr_dim = static_cast<int>(r.u32());
  cfg.sentences = static_cast<int>(r.u32());
  cfg.words = static_cast<int>(r.u32());
  cfg.classes = static_cast<int>(r.u32());
  cfg.dropout = r.f32();

  const std::uint32_t n_langs = r.u32();
  for (std::uint32_t i = 0; i < n_langs; ++i) {
    h.raw.lang_tags.push_back(r.string());
    const std::uint32_t n_tokens = r.u32();
    std::vector<std::string> tokens;
    tokens.reserve(n_tokens);
    for (std::uint32_t t = 0; t < n_tokens; ++t) tokens.push_back(r.string());
    h.lang_tokens.push_back(std::move(tokens));
  }

  const std::uint32_t n_tensors = r.u32();
  std::uint64_t expected_end = 0;
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    RawTensorEntry e;
    e.name = r.string();
    const std::uint32_t ndim = r.u32();
    if (ndim > 8)
      throw checkpoint_error(checkpoint_fault::inconsistent, "tensor rank out of range");
    std::uint64_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      const std::uint32_t extent = r.u32();
      if (extent == 0)
        throw checkpoint_error(checkpoint_fault::inconsistent, "zero tensor extent");
      e.shape.push_back(static_cast<int>(extent));
      numel *= extent;
    }
    e.offset = r.u64();
    e.byte_size = numel * 4;
    if (e.offset != expected_end)
      throw checkpoint_error(checkpoint_fault::inconsistent,
                             "tensor payload offsets are inconsistent");
    expected_end = e.offset + e.byte_size;
    h.raw.tensors.push_back(std::move(e));
  }

  const std::uint64_t payload_bytes = r.u64();
  if (payload_bytes != expected_end)
    throw checkpoint_error(checkpoint_fault::inconsistent,
                           "payload size does not match the tensor table");
  if (keep_payload) {
    h.raw.payload.resize(payload_bytes);
    if (payload_bytes) r.bytes(h.raw.payload.data(), payload_bytes);
    // Nothing may follow the payload.
    char extra;
    in.read(&extra, 1);
    if (in.gcount() != 0)
      throw checkpoint_error(checkpoint_fault::inconsistent,
                             "trailing bytes after checkpoint payload");
  }
  return h;
}

}  // namespace

void save_checkpoint(const TransferModel& model, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot write checkpoint: " + file.string());

  out.write(kCheckpointMagic, 8);
  put_u32(out, kCheckpointVersion);
  const ModelConfig& cfg = model.cfg;
  put_u32(out, static_cast<std::uint32_t>(cfg.embed_dim));
  put_u32(out, static_cast<std::uint32_t>(cfg.sent_hidden));
  put_u32(out, static_cast<std::uint32_t>(cfg.repr_dim));
  put_u32(out, static_cast<std::uint32_t>(cfg.sentences));
  put_u32(out, static_cast<std::uint32_t>(cfg.words));
  put_u32(out, static_cast<std::uint32_t>(cfg.classes));
  put_f32(out, cfg.dropout);

  put_u32(out, static_cast<std::uint32_t>(model.languages().size()));
  for (const auto& lang : model.languages()) {
    put_string(out, lang.tag);
    put_u32(out, static_cast<std::uint32_t>(lang.vocab.tokens().size()));
    for (const auto& token : lang.vocab.tokens()) put_string(out, token);
  }

  put_u32(out, static_cast<std::uint32_t>(model.params.size()));
  std::uint64_t offset = 0;
  for (int i = 0; i < model.params.size(); ++i) {
    const auto& slot = model.params.slot(i);
    put_string(out, slot.name);
    put_u32(out, static_cast<std::uint32_t>(slot.value.ndim()));
    for (int d = 0; d < slot.value.ndim(); ++d)
      put_u32(out, static_cast<std::uint32_t>(slot.value.dim(d)));
    put_u64(out, offset);
    offset += static_cast<std::uint64_t>(slot.value.size()) * 4;
  }
  put_u64(out, offset);
  for (int i = 0; i < model.params.size(); ++i) {
    const auto& slot = model.params.slot(i);
    out.write(reinterpret_cast<const char*>(slot.value.data()),
              static_cast<std::streamsize>(slot.value.size() * 4));
  }
  if (!out) throw data_error("failed writing checkpoint: " + file.string());
}

TransferModel load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw data_error("cannot read checkpoint: " + file.string());
  ParsedHeader h = parse(in, /*keep_payload=*/true);

  std::vector<LanguagePack> langs;
  for (std::size_t i = 0; i < h.raw.lang_tags.size(); ++i) {
    textpipe::Vocabulary vocab(h.raw.lang_tags[i]);
    for (const auto& token : h.lang_tokens[i]) vocab.add(token);
    langs.push_back(LanguagePack{h.raw.lang_tags[i], std::move(vocab)});
  }

  TransferModel model = assemble_model(h.raw.cfg, std::move(langs));
  for (const auto& entry : h.raw.tensors) {
    Tensor t(entry.shape);
    std::memcpy(t.data(), h.raw.payload.data() + entry.offset, entry.byte_size);
    if (!t.all_finite())
      throw checkpoint_error(checkpoint_fault::inconsistent,
                             "non-finite parameter values in checkpoint");
    model.params.add(entry.name, std::move(t));
  }

  // The slot set must be exactly what the architecture expects.
  std::vector<std::string> expected;
  for (const auto& lang : model.languages())
    expected.push_back(TransferModel::embed_slot(lang.tag));
  for (const auto& n : gru_param_names("sent")) expected.push_back(n);
  for (const auto& n : gru_param_names("review")) expected.push_back(n);
  expected.push_back("pred.W");
  expected.push_back("pred.b");
  if (static_cast<int>(expected.size()) != model.params.size())
    throw checkpoint_error(checkpoint_fault::inconsistent,
                           "checkpoint tensor set does not match the architecture");
  for (const auto& name : expected)
    if (!model.params.has(name))
      throw checkpoint_error(checkpoint_fault::inconsistent,
                             "checkpoint is missing tensor " + name);

  const auto expect_shape = [&](const std::string& name, std::vector<int> shape) {
    if (model.params.at(name).value.shape() != shape)
      throw checkpoint_error(checkpoint_fault::inconsistent,
                             "checkpoint tensor " + name + " has an unexpected shape");
  };
  const ModelConfig& cfg = model.cfg;
  for (const auto& lang : model.languages())
    expect_shape(TransferModel::embed_slot(lang.tag),
                 {lang.vocab.size(), cfg.embed_dim});
  expect_shape("pred.W", {cfg.classes, cfg.repr_dim});
  expect_shape("pred.b", {cfg.classes});
  expect_shape("sent.Wz", {cfg.embed_dim, cfg.sent_hidden});
  expect_shape("sent.Uz", {cfg.sent_hidden, cfg.sent_hidden});
  expect_shape("review.Wz", {cfg.sent_hidden, cfg.repr_dim});
  expect_shape("review.Uz", {cfg.repr_dim, cfg.repr_dim});
  return model;
}

std::vector<char> RawCheckpoint::tensor_bytes(const std::string& name) const {
  for (const auto& e : tensors)
    if (e.name == name)
      return std::vector<char>(payload.begin() + static_cast<std::ptrdiff_t>(e.offset),
                               payload.begin() + static_cast<std::ptrdiff_t>(e.offset +
                                                                             e.byte_size));
  throw config_error("checkpoint has no tensor named " + name);
}

RawCheckpoint read_checkpoint_raw(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw data_error("cannot read checkpoint: " + file.string());
  return parse(in, /*keep_payload=*/true).raw;
}

}  // namespace xlt::model
