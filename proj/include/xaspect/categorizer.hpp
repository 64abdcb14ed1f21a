#ifndef XASPECT_CATEGORIZER_HPP
#define XASPECT_CATEGORIZER_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xaspect/nn.hpp"

namespace xaspect {

// Sentence-level multi-label category head: general attention pooling over
// token representations, then one bank of per-category binary classifiers per
// domain (category sets differ across domains; the pooling map is shared).
class Categorizer {
 public:
  Categorizer(nn::ParamStore& store, int d_s, Rng& rng);

  void add_domain(nn::ParamStore& store, const std::string& domain,
                  int num_categories, Rng& rng);

  struct Pooled {
    ad::Tape::Id s;               // 1 x d_s
    Eigen::RowVectorXd alpha_g;   // attention weights over positions
  };
  Pooled sentence_vector(ad::Tape& t, ad::Tape::Id H) const;

  // Per-category logits for a pooled sentence vector, 1 x |C^domain|.
  ad::Tape::Id logits(ad::Tape& t, ad::Tape::Id s, const std::string& domain) const;

  // Sum over categories of binary cross-entropy against labels z, computed
  // as softplus(logit) - z * logit for stability.
  ad::Tape::Id bce(ad::Tape& t, ad::Tape::Id logits,
                   const std::vector<std::uint8_t>& z) const;

  Eigen::RowVectorXd probabilities(ad::Tape& t, ad::Tape::Id H,
                                   const std::string& domain) const;

  int num_categories(const std::string& domain) const;

 private:
  const nn::Linear& heads(const std::string& domain) const;

  Parameter* w_;  // d_s x 1 attention map, no bias
  std::map<std::string, nn::Linear> heads_;
};

}  // namespace xaspect

#endif
