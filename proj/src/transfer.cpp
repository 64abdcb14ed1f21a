#include "xaspect/transfer.hpp"

#include <string>

#include "xaspect/errors.hpp"

namespace xaspect {

ReconstructionBank::ReconstructionBank(nn::ParamStore& store, int levels,
                                       int fc_dim, int mid_dim, int s_dim,
                                       Rng& rng) {
  if (levels < 0) throw ConfigError("reconstruction levels must be >= 0");
  for (int k = 0; k < levels; ++k) {
    const std::string base = "recon" + std::to_string(k + 1);
    Decoder d;
    d.W1 = &store.make(base + ".W1", fc_dim, mid_dim);
    d.W2 = &store.make(base + ".W2", mid_dim, s_dim);
    nn::glorot_init(*d.W1, rng);
    nn::glorot_init(*d.W2, rng);
    decoders_.push_back(d);
  }
}

ad::Tape::Id ReconstructionBank::aggregate(ad::Tape& t, ad::Tape::Id r_k) {
  return t.colwise_sum(r_k);
}

ad::Tape::Id ReconstructionBank::distance(ad::Tape& t, ad::Tape::Id s,
                                          ad::Tape::Id s_k, int k) const {
  if (k < 0 || k >= levels())
    throw ValidationError("reconstruction level out of range: " + std::to_string(k + 1));
  const Decoder& d = decoders_[static_cast<std::size_t>(k)];
  ad::Tape::Id hidden = t.relu(t.matmul(s_k, t.param(*d.W1)));
  ad::Tape::Id decoded = t.matmul(hidden, t.param(*d.W2));
  return t.squared_norm(t.sub(s, decoded));
}

ad::Tape::Id ReconstructionBank::sentence_loss(
    ad::Tape& t, ad::Tape::Id s, const std::vector<ad::Tape::Id>& fc_levels) const {
  if (levels() > static_cast<int>(fc_levels.size()))
    throw ValidationError("fewer FC levels than reconstruction decoders");
  ad::Tape::Id total = -1;
  for (int k = 0; k < levels(); ++k) {
    ad::Tape::Id d =
        distance(t, s, aggregate(t, fc_levels[static_cast<std::size_t>(k)]), k);
    total = total < 0 ? d : t.add(total, d);
  }
  return total;
}

}  // namespace xaspect
