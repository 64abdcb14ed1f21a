#include "xaspect/extractor.hpp"

#include <string>

#include "xaspect/errors.hpp"

namespace xaspect {

FcStack::FcStack(nn::ParamStore& store, int in_dim, int layers, int dim, Rng& rng)
    : dim_(dim) {
  if (layers < 1) throw ConfigError("fc stack needs at least one layer");
  for (int k = 0; k < layers; ++k) {
    const int in = k == 0 ? in_dim : dim;
    layers_.push_back(
        nn::make_linear(store, "fc" + std::to_string(k + 1), in, dim, true, rng));
  }
}

std::vector<ad::Tape::Id> FcStack::apply(ad::Tape& t, ad::Tape::Id h) const {
  std::vector<ad::Tape::Id> levels;
  levels.reserve(layers_.size());
  ad::Tape::Id x = h;
  for (const nn::Linear& l : layers_) {
    x = t.relu(l.apply(t, x));
    levels.push_back(x);
  }
  return levels;
}

Crf::Crf(nn::ParamStore& store, int in_dim, Rng& rng) {
  emit_ = &store.make("crf.emit", in_dim, kNumTags);
  nn::glorot_init(*emit_, rng);
  trans_ = &store.make("crf.trans", kNumTags, kNumTags);
  start_ = &store.make("crf.start", 1, kNumTags);
  stop_ = &store.make("crf.stop", 1, kNumTags);
}

ad::Tape::Id Crf::emissions(ad::Tape& t, ad::Tape::Id r_last) const {
  return t.matmul(r_last, t.param(*emit_));
}

ad::Tape::Id Crf::score(ad::Tape& t, ad::Tape::Id emissions,
                        const std::vector<BioTag>& tags) const {
  const int n = static_cast<int>(t.value(emissions).rows());
  if (static_cast<int>(tags.size()) != n)
    throw ValidationError("tag sequence length does not match emissions");
  ad::Tape::Id tr = t.param(*trans_);
  ad::Tape::Id s = t.pick(t.param(*start_), 0, static_cast<int>(tags[0]));
  for (int i = 0; i < n; ++i) {
    s = t.add(s, t.pick(emissions, i, static_cast<int>(tags[static_cast<std::size_t>(i)])));
    if (i + 1 < n)
      s = t.add(s, t.pick(tr, static_cast<int>(tags[static_cast<std::size_t>(i)]),
                          static_cast<int>(tags[static_cast<std::size_t>(i + 1)])));
  }
  return t.add(s, t.pick(t.param(*stop_), 0, static_cast<int>(tags.back())));
}

ad::Tape::Id Crf::log_partition(ad::Tape& t, ad::Tape::Id emissions) const {
  const int n = static_cast<int>(t.value(emissions).rows());
  ad::Tape::Id tr = t.param(*trans_);
  // alpha: 1 x 3 log-sum of path scores ending in each tag
  ad::Tape::Id alpha = t.add(t.row(emissions, 0), t.param(*start_));
  for (int i = 1; i < n; ++i) {
    // paths[y][y'] = alpha[y] + transition[y][y']
    ad::Tape::Id paths = t.add_colvec(tr, t.transpose(alpha));
    alpha = t.add(t.row(emissions, i), t.logsumexp_cols(paths));
  }
  alpha = t.add(alpha, t.param(*stop_));
  return t.logsumexp_cols(t.transpose(alpha));
}

ad::Tape::Id Crf::nll(ad::Tape& t, ad::Tape::Id emissions,
                      const std::vector<BioTag>& tags) const {
  return t.sub(log_partition(t, emissions), score(t, emissions, tags));
}

std::vector<BioTag> Crf::decode(const Mat& emissions) const {
  const int n = static_cast<int>(emissions.rows());
  if (n == 0) throw ValidationError("cannot decode an empty sentence");
  const Mat& tr = trans_->value;
  Mat best(n, kNumTags);
  Eigen::MatrixXi back(n, kNumTags);
  best.row(0) = emissions.row(0) + start_->value.row(0);
  for (int i = 1; i < n; ++i) {
    for (int to = 0; to < kNumTags; ++to) {
      int arg = 0;
      double v = best(i - 1, 0) + tr(0, to);
      for (int from = 1; from < kNumTags; ++from) {
        const double cand = best(i - 1, from) + tr(from, to);
        if (cand > v) { v = cand; arg = from; }
      }
      best(i, to) = v + emissions(i, to);
      back(i, to) = arg;
    }
  }
  int tag = 0;
  double v = best(n - 1, 0) + stop_->value(0, 0);
  for (int y = 1; y < kNumTags; ++y) {
    const double cand = best(n - 1, y) + stop_->value(0, y);
    if (cand > v) { v = cand; tag = y; }
  }
  std::vector<BioTag> out(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<BioTag>(tag);
    if (i > 0) tag = back(i, tag);
  }
  return out;
}

}  // namespace xaspect
