#ifndef XASPECT_CONFIG_HPP
#define XASPECT_CONFIG_HPP

#include <cstdint>
#include <string>

#include "xaspect/encoder.hpp"

namespace xaspect {

struct ModelConfig {
  int embedding_dim = 300;
  int lstm_layers = 3;
  int lstm_total = 400;   // both directions together
  int heads = 8;
  int fc_layers = 4;
  int fc_dim = 512;
  int recon_levels = 3;
  double lambda = 0.4;
  double beta = 0.8;
  double lr = 0.008;
  int batch = 64;
  int epochs = 20;
  double dropout = 0.45;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;  // <= 0 disables gradient clipping

  // Ablation switches: lambda/beta stay reportable while the loss term is cut.
  bool scm_on = true;          // off -> lambda treated as 0 (-SCM)
  bool itm_on = true;          // off -> beta treated as 0 (-ITM)
  bool itm_source_on = true;   // off -> source excluded from L_r (-ITMs)
  bool freeze_embeddings = false;
  bool lowercase = false;

  double effective_lambda() const { return scm_on ? lambda : 0.0; }
  double effective_beta() const { return itm_on ? beta : 0.0; }

  EncoderConfig encoder() const {
    EncoderConfig e;
    e.emb_dim = embedding_dim;
    e.lstm_layers = lstm_layers;
    e.lstm_hidden = lstm_total / 2;
    e.heads = heads;
    e.dropout = dropout;
    return e;
  }

  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
  static ModelConfig load_file(const std::string& path);
  void save_file(const std::string& path) const;
};

}  // namespace xaspect

#endif
