#ifndef XASPECT_TRANSFER_HPP
#define XASPECT_TRANSFER_HPP

#include <vector>

#include "xaspect/nn.hpp"

namespace xaspect {

// Bank of two-layer reconstruction decoders, one per decoded FC level, shared
// across domains. Level k's decoder maps the aggregated fine-grained vector
// s_k back toward the coarse-grained sentence vector s; the loss is the
// squared L2 distance, and gradients flow into both sides.
class ReconstructionBank {
 public:
  ReconstructionBank(nn::ParamStore& store, int levels, int fc_dim, int mid_dim,
                     int s_dim, Rng& rng);

  int levels() const { return static_cast<int>(decoders_.size()); }

  // s_k = sum over rows (token positions) of r_k; 1 x d_fc.
  static ad::Tape::Id aggregate(ad::Tape& t, ad::Tape::Id r_k);

  // ||s - relu(s_k W1) W2||^2 for the decoder at 0-based index k.
  ad::Tape::Id distance(ad::Tape& t, ad::Tape::Id s, ad::Tape::Id s_k, int k) const;

  // Sum of distance over decoded levels; fc_levels holds r^1..r^K of which
  // the first `levels()` are decoded. Returns -1 when the bank is empty.
  ad::Tape::Id sentence_loss(ad::Tape& t, ad::Tape::Id s,
                             const std::vector<ad::Tape::Id>& fc_levels) const;

 private:
  struct Decoder {
    Parameter* W1;  // d_fc x d_mid
    Parameter* W2;  // d_mid x d_s
  };
  std::vector<Decoder> decoders_;
};

}  // namespace xaspect

#endif
