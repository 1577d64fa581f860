#pragma once

namespace xlt::model {

// Architecture sizes. Defaults are the standard configuration: 64-d
// embeddings, 256-wide sentence and review encoders, 30x20 input grids,
// one sigmoid output neuron, dropout 0.5 everywhere except embeddings.
struct ModelConfig {
  int embed_dim = 64;    // d, shared across languages
  int sent_hidden = 256; // h, sentence GRU state
  int repr_dim = 256;    // d^T, review GRU state = task representation
  int sentences = 30;    // S, review grid rows
  int words = 20;        // W, review grid columns
  int classes = 1;       // K; 1 selects the binary sigmoid head
  float dropout = 0.5f;
};

}  // namespace xlt::model
