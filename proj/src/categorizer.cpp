#include "xaspect/categorizer.hpp"

#include "xaspect/errors.hpp"

namespace xaspect {

Categorizer::Categorizer(nn::ParamStore& store, int d_s, Rng& rng) {
  w_ = &store.make("pool.w", d_s, 1);
  nn::glorot_init(*w_, rng);
}

void Categorizer::add_domain(nn::ParamStore& store, const std::string& domain,
                             int num_categories, Rng& rng) {
  if (heads_.count(domain))
    throw ValidationError("duplicate category head bank: " + domain);
  if (num_categories < 1)
    throw ValidationError("domain " + domain + " has no categories");
  heads_.emplace(domain, nn::make_linear(store, "cat." + domain,
                                         static_cast<int>(w_->value.rows()),
                                         num_categories, true, rng));
}

const nn::Linear& Categorizer::heads(const std::string& domain) const {
  auto it = heads_.find(domain);
  if (it == heads_.end())
    throw ValidationError("no category heads registered for domain: " + domain);
  return it->second;
}

int Categorizer::num_categories(const std::string& domain) const {
  return static_cast<int>(heads(domain).W->value.cols());
}

Categorizer::Pooled Categorizer::sentence_vector(ad::Tape& t, ad::Tape::Id H) const {
  if (t.value(H).rows() < 1)
    throw ValidationError("cannot pool an empty sentence");
  // alpha_g = softmax_i(w . h_i); s = alpha_g H
  ad::Tape::Id scores = t.transpose(t.matmul(H, t.param(*w_)));  // 1 x n
  ad::Tape::Id alpha = t.softmax_rows(scores);
  Pooled out;
  out.alpha_g = t.value(alpha).row(0);
  out.s = t.matmul(alpha, H);
  return out;
}

ad::Tape::Id Categorizer::logits(ad::Tape& t, ad::Tape::Id s,
                                 const std::string& domain) const {
  return heads(domain).apply(t, s);
}

ad::Tape::Id Categorizer::bce(ad::Tape& t, ad::Tape::Id logits,
                              const std::vector<std::uint8_t>& z) const {
  const Eigen::Index c = t.value(logits).cols();
  if (static_cast<Eigen::Index>(z.size()) != c)
    throw ValidationError("category label vector length mismatch");
  Mat zm(1, c);
  for (Eigen::Index j = 0; j < c; ++j) zm(0, j) = z[static_cast<std::size_t>(j)];
  ad::Tape::Id pos = t.sum_all(t.softplus(logits));
  ad::Tape::Id lbl = t.sum_all(t.hadamard(logits, t.constant(std::move(zm))));
  return t.sub(pos, lbl);
}

Eigen::RowVectorXd Categorizer::probabilities(ad::Tape& t, ad::Tape::Id H,
                                              const std::string& domain) const {
  Pooled p = sentence_vector(t, H);
  ad::Tape::Id probs = t.sigmoid(logits(t, p.s, domain));
  return t.value(probs).row(0);
}

}  // namespace xaspect
