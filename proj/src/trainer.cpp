#include "xaspect/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "xaspect/errors.hpp"

namespace xaspect {

namespace {

constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kBatchStream = 3;

// Without-replacement index stream that reshuffles and cycles on exhaustion.
class IndexStream {
 public:
  IndexStream(std::size_t n, std::uint64_t seed) : rng_(seed) {
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<int>(i);
    rng_.shuffle(order_);
  }

  int next() {
    if (pos_ == order_.size()) {
      rng_.shuffle(order_);
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  std::vector<int> order_;
  std::size_t pos_ = 0;
  Rng rng_;
};

}  // namespace

std::vector<Batch> make_batches(std::size_t n_source, std::size_t n_target,
                                int batch_size, std::uint64_t seed, int epoch) {
  if (n_source == 0 || n_target == 0)
    throw ValidationError("cannot batch an empty corpus");
  if (batch_size < 2 || batch_size % 2 != 0)
    throw ValidationError("batch size must be even and >= 2");
  const std::size_t half = static_cast<std::size_t>(batch_size) / 2;
  const std::size_t longest = std::max(n_source, n_target);
  const std::size_t num_batches = (longest + half - 1) / half;

  const std::uint64_t base =
      mix_seed(mix_seed(seed, kBatchStream), static_cast<std::uint64_t>(epoch));
  IndexStream src(n_source, mix_seed(base, 0));
  IndexStream tgt(n_target, mix_seed(base, 1));

  std::vector<Batch> batches(num_batches);
  for (Batch& b : batches) {
    b.source.reserve(half);
    b.target.reserve(half);
    for (std::size_t i = 0; i < half; ++i) b.source.push_back(src.next());
    for (std::size_t i = 0; i < half; ++i) b.target.push_back(tgt.next());
  }
  return batches;
}

Adam::Adam(nn::ParamStore& store, double lr) : store_(store), lr_(lr) {
  for (const auto& p : store.all()) {
    m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step(double clip_norm) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  const auto& params = store_.all();

  if (clip_norm > 0) {
    double sq = 0;
    for (const auto& p : params)
      if (p->trainable) sq += p->grad.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > clip_norm) {
      const double scale = clip_norm / norm;
      for (const auto& p : params)
        if (p->trainable) p->grad *= scale;
    }
  }

  ++t_;
  const double bc1 = 1.0 - std::pow(kBeta1, t_);
  const double bc2 = 1.0 - std::pow(kBeta2, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.trainable) continue;
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * p.grad;
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -=
        lr_ * (m_[i].array() / bc1) /
        ((v_[i].array() / bc2).sqrt() + kEps);
  }
}

namespace {

double term_value(const ad::Tape& t, ad::Tape::Id id) {
  return id < 0 ? 0.0 : t.value(id)(0, 0);
}

void check_finite(double v, const char* component, int epoch, int batch) {
  if (!std::isfinite(v)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "%s became non-finite at epoch %d, batch %d", component,
                  epoch + 1, batch + 1);
    throw TrainingDiverged(buf);
  }
}

}  // namespace

TrainingState fit(Model& model, const DomainCorpus& source,
                  const DomainCorpus& target, std::ostream* log) {
  const ModelConfig& cfg = model.config();
  if (!source.has_token_labels)
    throw ValidationError("source corpus must carry gold tags");
  if (source.sentences.empty() || target.sentences.empty())
    throw ValidationError("cannot train on an empty corpus");

  Rng dropout_rng(mix_seed(cfg.seed, kDropoutStream));
  Adam opt(model.params(), cfg.lr);
  TrainingState state;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<Batch> batches = make_batches(
        source.sentences.size(), target.sentences.size(), cfg.batch, cfg.seed, epoch);
    EpochLosses ep;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const Batch& b = batches[bi];
      std::vector<const Sentence*> src, tgt;
      for (int i : b.source) src.push_back(&source.sentences[static_cast<std::size_t>(i)]);
      for (int i : b.target) tgt.push_back(&target.sentences[static_cast<std::size_t>(i)]);

      model.params().zero_grads();
      ad::Tape tape;
      Model::LossIds ids = model.batch_losses(tape, src, tgt, true, dropout_rng);

      const int bn = static_cast<int>(bi);
      const double le = term_value(tape, ids.l_e);
      const double lc = term_value(tape, ids.l_c);
      const double lr = term_value(tape, ids.l_r);
      check_finite(le, "extraction loss", epoch, bn);
      check_finite(lc, "categorization loss", epoch, bn);
      check_finite(lr, "reconstruction loss", epoch, bn);
      check_finite(term_value(tape, ids.total), "total loss", epoch, bn);

      tape.backward(ids.total);
      opt.step(cfg.clip_norm);

      ep.l_e += le;
      ep.l_c += lc;
      ep.l_r += lr;
      ep.total += term_value(tape, ids.total);
    }
    const double nb = static_cast<double>(batches.size());
    ep.l_e /= nb; ep.l_c /= nb; ep.l_r /= nb; ep.total /= nb;
    state.history.push_back(ep);
    if (log) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "epoch %d loss %.9f extraction %.9f categorization %.9f "
                    "reconstruction %.9f",
                    epoch + 1, ep.total, ep.l_e, ep.l_c, ep.l_r);
      *log << buf << "\n";
    }
  }
  state.rng_state = dropout_rng.state();
  return state;
}

const std::vector<std::string>& ablation_names() {
  static const std::vector<std::string> names = {"full", "-SCM", "-ITM",
                                                 "-ITMs", "source-only"};
  return names;
}

ModelConfig apply_ablation(ModelConfig config, const std::string& which) {
  config.scm_on = true;
  config.itm_on = true;
  config.itm_source_on = true;
  if (which == "full") return config;
  if (which == "-SCM") {
    config.scm_on = false;
    config.lambda = 0;
    return config;
  }
  if (which == "-ITM") {
    config.itm_on = false;
    config.beta = 0;
    return config;
  }
  if (which == "-ITMs") {
    config.itm_source_on = false;
    return config;
  }
  if (which == "source-only") {
    config.scm_on = false;
    config.itm_on = false;
    config.lambda = 0;
    config.beta = 0;
    return config;
  }
  throw UsageError("unknown ablation: " + which +
                   " (expected full, -SCM, -ITM, -ITMs, or source-only)");
}

F1Report evaluate_extraction(const Model& model, const DomainCorpus& corpus) {
  if (!corpus.has_token_labels)
    throw ValidationError("evaluation needs gold spans: corpus " + corpus.name +
                          " has no token labels");
  std::vector<SpanSet> predicted, gold;
  predicted.reserve(corpus.sentences.size());
  gold.reserve(corpus.sentences.size());
  for (const Sentence& s : corpus.sentences) {
    predicted.push_back(tags_to_spans(model.predict_tags(s)));
    gold.push_back(s.gold_spans());
  }
  return exact_match_f1(predicted, gold);
}

}  // namespace xaspect
