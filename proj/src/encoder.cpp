#include "xaspect/encoder.hpp"

#include <cmath>
#include <string>

#include "xaspect/errors.hpp"

namespace xaspect {

void EncoderConfig::validate() const {
  if (emb_dim < 1) throw ConfigError("embedding dim must be positive");
  if (lstm_layers < 1) throw ConfigError("need at least one recurrent layer");
  if (lstm_hidden < 1) throw ConfigError("lstm hidden size must be positive");
  if (heads < 0) throw ConfigError("heads must be >= 0");
  if (heads > 0 && d_h() % heads != 0)
    throw ConfigError("token width " + std::to_string(d_h()) +
                      " not divisible by " + std::to_string(heads) + " heads");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
}

Encoder::Encoder(nn::ParamStore& store, const EncoderConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  cfg_.validate();
  const int h = cfg_.lstm_hidden;
  auto make_dir = [&](const std::string& name, int in) {
    LstmDir d;
    d.W_x = &store.make(name + ".W_x", in, 4 * h);
    d.W_h = &store.make(name + ".W_h", h, 4 * h);
    d.b = &store.make(name + ".b", 1, 4 * h);
    nn::glorot_init(*d.W_x, rng);
    nn::glorot_init(*d.W_h, rng);
    d.b->value.middleCols(h, h).setOnes();  // forget gate bias 1
    return d;
  };
  for (int l = 0; l < cfg_.lstm_layers; ++l) {
    const int in = l == 0 ? cfg_.emb_dim : cfg_.d_h();
    const std::string base = "lstm" + std::to_string(l);
    fwd_.push_back(make_dir(base + ".fwd", in));
    bwd_.push_back(make_dir(base + ".bwd", in));
  }
  const int d = cfg_.head_dim();
  for (int m = 0; m < cfg_.heads; ++m) {
    const std::string base = "attn" + std::to_string(m);
    w_q_.push_back(&store.make(base + ".W_q", cfg_.d_h(), d));
    w_k_.push_back(&store.make(base + ".W_k", cfg_.d_h(), d));
    w_v_.push_back(&store.make(base + ".W_v", cfg_.d_h(), d));
    nn::glorot_init(*w_q_.back(), rng);
    nn::glorot_init(*w_k_.back(), rng);
    nn::glorot_init(*w_v_.back(), rng);
  }
}

ad::Tape::Id Encoder::run_direction(ad::Tape& t, ad::Tape::Id X,
                                    const LstmDir& d, bool reversed) const {
  const int n = static_cast<int>(t.value(X).rows());
  const int h = cfg_.lstm_hidden;
  // One GEMM for every timestep's input contribution, bias folded in.
  ad::Tape::Id xw = t.add_rowvec(t.matmul(X, t.param(*d.W_x)), t.param(*d.b));
  ad::Tape::Id wh = t.param(*d.W_h);

  ad::Tape::Id h_prev = t.constant(Mat::Zero(1, h));
  ad::Tape::Id c_prev = t.constant(Mat::Zero(1, h));
  std::vector<ad::Tape::Id> states(static_cast<std::size_t>(n));
  for (int step = 0; step < n; ++step) {
    const int i = reversed ? n - 1 - step : step;
    ad::Tape::Id z = t.add(t.row(xw, i), t.matmul(h_prev, wh));
    ad::Tape::Id gi = t.sigmoid(t.slice_cols(z, 0, h));
    ad::Tape::Id gf = t.sigmoid(t.slice_cols(z, h, h));
    ad::Tape::Id gg = t.tanh(t.slice_cols(z, 2 * h, h));
    ad::Tape::Id go = t.sigmoid(t.slice_cols(z, 3 * h, h));
    c_prev = t.add(t.hadamard(gf, c_prev), t.hadamard(gi, gg));
    h_prev = t.hadamard(go, t.tanh(c_prev));
    states[static_cast<std::size_t>(i)] = h_prev;
  }
  return t.concat_rows(states);
}

EncoderOut Encoder::encode(ad::Tape& t, ad::Tape::Id embeddings, bool train,
                           Rng& rng) const {
  const Eigen::Index n = t.value(embeddings).rows();
  if (n == 0) throw ValidationError("cannot encode an empty sentence");
  if (t.value(embeddings).cols() != cfg_.emb_dim)
    throw ValidationError("embedding width mismatch");

  ad::Tape::Id x = embeddings;
  for (int l = 0; l < cfg_.lstm_layers; ++l) {
    ad::Tape::Id f = run_direction(t, x, fwd_[static_cast<std::size_t>(l)], false);
    ad::Tape::Id b = run_direction(t, x, bwd_[static_cast<std::size_t>(l)], true);
    x = t.concat_cols({f, b});
    if (train && cfg_.dropout > 0.0)
      x = t.dropout(x, nn::dropout_mask(n, cfg_.d_h(), cfg_.dropout, rng));
  }

  EncoderOut out;
  out.h_last = x;
  if (cfg_.heads == 0) {
    out.attended = x;
    return out;
  }

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(cfg_.head_dim()));
  std::vector<ad::Tape::Id> heads;
  heads.reserve(static_cast<std::size_t>(cfg_.heads));
  for (int m = 0; m < cfg_.heads; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    ad::Tape::Id q = t.matmul(x, t.param(*w_q_[mi]));
    ad::Tape::Id k = t.matmul(x, t.param(*w_k_[mi]));
    ad::Tape::Id v = t.matmul(x, t.param(*w_v_[mi]));
    ad::Tape::Id logits = t.scale(t.matmul(q, t.transpose(k)), inv_sqrt_d);
    ad::Tape::Id alpha = t.softmax_rows(logits);
    out.alpha.push_back(t.value(alpha));
    heads.push_back(t.matmul(alpha, v));
  }
  ad::Tape::Id attended = cfg_.heads == 1 ? heads.front() : t.concat_cols(heads);
  if (train && cfg_.dropout > 0.0)
    attended = t.dropout(
        attended, nn::dropout_mask(n, cfg_.attended_dim(), cfg_.dropout, rng));
  out.attended = attended;
  return out;
}

}  // namespace xaspect
