#ifndef XASPECT_ENCODER_HPP
#define XASPECT_ENCODER_HPP

#include <vector>

#include "xaspect/nn.hpp"

namespace xaspect {

struct EncoderConfig {
  int emb_dim = 300;
  int lstm_layers = 3;
  int lstm_hidden = 200;  // per direction; token output width is twice this
  int heads = 8;          // M; 0 removes attention (identity on H_T)
  double dropout = 0.45;

  int d_h() const { return 2 * lstm_hidden; }
  int head_dim() const { return heads == 0 ? 0 : d_h() / heads; }
  int attended_dim() const { return heads == 0 ? d_h() : heads * head_dim(); }
  void validate() const;
};

struct EncoderOut {
  ad::Tape::Id h_last;             // n x d_h, last recurrent layer
  ad::Tape::Id attended;           // n x attended_dim
  std::vector<Mat> alpha;          // per head, n x n attention weights
};

// Multi-layer bidirectional LSTM followed by multi-head self-attention.
// Query/key/value projections carry no bias; attention heads are concatenated
// with no output projection. Dropout sits on each recurrent layer's output
// and on the attention output, training mode only.
class Encoder {
 public:
  Encoder(nn::ParamStore& store, const EncoderConfig& cfg, Rng& rng);

  EncoderOut encode(ad::Tape& t, ad::Tape::Id embeddings, bool train, Rng& rng) const;

  const EncoderConfig& config() const { return cfg_; }

 private:
  struct LstmDir {
    Parameter* W_x;  // in x 4h, gate order i,f,g,o
    Parameter* W_h;  // h x 4h
    Parameter* b;    // 1 x 4h
  };

  ad::Tape::Id run_direction(ad::Tape& t, ad::Tape::Id X, const LstmDir& d,
                             bool reversed) const;

  EncoderConfig cfg_;
  std::vector<LstmDir> fwd_, bwd_;               // one per layer
  std::vector<Parameter*> w_q_, w_k_, w_v_;      // one per head, d_h x d
};

}  // namespace xaspect

#endif
