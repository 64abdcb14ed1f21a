#ifndef XASPECT_TRAINER_HPP
#define XASPECT_TRAINER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "xaspect/metrics.hpp"
#include "xaspect/model.hpp"

namespace xaspect {

struct Batch {
  std::vector<int> source;  // indices into the source corpus
  std::vector<int> target;
};

// Half/half mixed batches: ceil(max(Ns,Nt)/(batch/2)) batches per epoch, each
// corpus sampled without replacement until exhausted, the shorter one
// reshuffled and cycled. Deterministic under (seed, epoch).
std::vector<Batch> make_batches(std::size_t n_source, std::size_t n_target,
                                int batch_size, std::uint64_t seed, int epoch);

class Adam {
 public:
  Adam(nn::ParamStore& store, double lr);

  // One update from the gradients currently in the store; clip_norm <= 0
  // disables global-norm clipping. Does not zero gradients.
  void step(double clip_norm);

 private:
  nn::ParamStore& store_;
  double lr_;
  int t_ = 0;
  std::vector<Mat> m_, v_;
};

struct EpochLosses {
  double total = 0, l_e = 0, l_c = 0, l_r = 0;  // means over the epoch's batches
};

struct TrainingState {
  std::vector<EpochLosses> history;
  std::string rng_state;  // dropout stream at end of training
};

// Joint training per the fixed recipe: epochs x mixed batches, Adam, dropout
// on. Writes one line per epoch to `log` when given. Throws TrainingDiverged
// when a loss component goes non-finite, naming the component.
TrainingState fit(Model& model, const DomainCorpus& source,
                  const DomainCorpus& target, std::ostream* log = nullptr);

// Ablation names -> config edits: "full", "-SCM", "-ITM", "-ITMs",
// "source-only". Unknown names throw UsageError.
ModelConfig apply_ablation(ModelConfig config, const std::string& which);
const std::vector<std::string>& ablation_names();

// Viterbi-decode every sentence, convert to spans, score exact-match F1
// against gold spans. The corpus must carry gold tags.
F1Report evaluate_extraction(const Model& model, const DomainCorpus& corpus);

}  // namespace xaspect

#endif
