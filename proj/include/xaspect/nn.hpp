#ifndef XASPECT_NN_HPP
#define XASPECT_NN_HPP

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "xaspect/autodiff.hpp"
#include "xaspect/rng.hpp"

namespace xaspect {
namespace nn {

// Owns all model parameters at stable addresses, in creation order. The
// optimizer and the checkpoint format both iterate in that order, so it must
// be deterministic for a given configuration.
class ParamStore {
 public:
  Parameter& make(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Parameter* find(const std::string& name) const;

  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  void zero_grads();
  std::size_t scalar_count() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, Parameter*> by_name_;
};

void uniform_init(Parameter& p, double lo, double hi, Rng& rng);
// Glorot/Xavier uniform with fan_in = rows, fan_out = cols.
void glorot_init(Parameter& p, Rng& rng);

// y = x W + b with W: in x out, b: 1 x out (optional), x: n x in.
struct Linear {
  Parameter* W = nullptr;
  Parameter* b = nullptr;

  ad::Tape::Id apply(ad::Tape& t, ad::Tape::Id x) const;
};

Linear make_linear(ParamStore& store, const std::string& name, int in, int out,
                   bool bias, Rng& rng);

// Inverted-dropout mask: entries are 1/(1-p) with probability 1-p, else 0.
Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng);

}  // namespace nn
}  // namespace xaspect

#endif
