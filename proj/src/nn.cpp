#include "xaspect/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace xaspect {
namespace nn {

Parameter& ParamStore::make(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (by_name_.count(name))
    throw std::logic_error("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(name, rows, cols));
  Parameter* p = params_.back().get();
  by_name_.emplace(name, p);
  return *p;
}

Parameter* ParamStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void uniform_init(Parameter& p, double lo, double hi, Rng& rng) {
  for (Eigen::Index r = 0; r < p.value.rows(); ++r)
    for (Eigen::Index c = 0; c < p.value.cols(); ++c)
      p.value(r, c) = rng.uniform(lo, hi);
}

void glorot_init(Parameter& p, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  uniform_init(p, -limit, limit, rng);
}

ad::Tape::Id Linear::apply(ad::Tape& t, ad::Tape::Id x) const {
  ad::Tape::Id y = t.matmul(x, t.param(*W));
  if (b) y = t.add_rowvec(y, t.param(*b));
  return y;
}

Linear make_linear(ParamStore& store, const std::string& name, int in, int out,
                   bool bias, Rng& rng) {
  Linear l;
  l.W = &store.make(name + ".W", in, out);
  glorot_init(*l.W, rng);
  if (bias) l.b = &store.make(name + ".b", 1, out);  // zero-initialized
  return l;
}

Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  const double keep = 1.0 - p;
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = rng.uniform01() < keep ? 1.0 / keep : 0.0;
  return m;
}

}  // namespace nn
}  // namespace xaspect
