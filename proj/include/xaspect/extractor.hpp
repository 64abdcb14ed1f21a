#ifndef XASPECT_EXTRACTOR_HPP
#define XASPECT_EXTRACTOR_HPP

#include <vector>

#include "xaspect/bio.hpp"
#include "xaspect/nn.hpp"

namespace xaspect {

// Stack of fully-connected ReLU layers over the encoder output. apply()
// returns the K levels r^1..r^K (the input itself is level 0 and is not
// returned); every level is n x fc_dim.
class FcStack {
 public:
  FcStack(nn::ParamStore& store, int in_dim, int layers, int dim, Rng& rng);

  std::vector<ad::Tape::Id> apply(ad::Tape& t, ad::Tape::Id h) const;

  int depth() const { return static_cast<int>(layers_.size()); }
  int dim() const { return dim_; }

 private:
  std::vector<nn::Linear> layers_;
  int dim_;
};

// Linear-chain CRF over BIO tags. The score of a tag sequence decomposes as
// start[y_1] + sum_i emission(i)[y_i] + sum_i transition[y_i][y_{i+1}] +
// stop[y_n]. Emissions come from a bias-free linear map of r^K.
class Crf {
 public:
  Crf(nn::ParamStore& store, int in_dim, Rng& rng);

  ad::Tape::Id emissions(ad::Tape& t, ad::Tape::Id r_last) const;  // n x 3
  ad::Tape::Id score(ad::Tape& t, ad::Tape::Id emissions,
                     const std::vector<BioTag>& tags) const;
  ad::Tape::Id log_partition(ad::Tape& t, ad::Tape::Id emissions) const;
  // log_partition - score(gold); always >= 0
  ad::Tape::Id nll(ad::Tape& t, ad::Tape::Id emissions,
                   const std::vector<BioTag>& tags) const;

  // Max-score decode on raw emission values; ties broken toward the smallest
  // tag index (BA < IA < N).
  std::vector<BioTag> decode(const Mat& emissions) const;

  const Parameter& transition() const { return *trans_; }

 private:
  Parameter* emit_;   // in_dim x 3
  Parameter* trans_;  // 3 x 3, [from][to]
  Parameter* start_;  // 1 x 3
  Parameter* stop_;   // 1 x 3
};

}  // namespace xaspect

#endif
