#ifndef XASPECT_MODEL_HPP
#define XASPECT_MODEL_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "xaspect/categorizer.hpp"
#include "xaspect/config.hpp"
#include "xaspect/corpus.hpp"
#include "xaspect/embeddings.hpp"
#include "xaspect/encoder.hpp"
#include "xaspect/extractor.hpp"
#include "xaspect/transfer.hpp"

namespace xaspect {

// The full network: shared embedding + encoder, extraction head (FC stack +
// CRF), categorization head (pooling + per-domain classifiers), and the
// reconstruction decoder bank. Owns every parameter through one store.
class Model {
 public:
  using DomainSpec = std::pair<std::string, int>;  // name, category count

  Model(const ModelConfig& config, EmbeddingTable embeddings,
        const std::vector<DomainSpec>& domains);

  struct Forward {
    ad::Tape::Id emissions;                // n x 3
    ad::Tape::Id s;                        // 1 x d_s pooled sentence vector
    std::vector<ad::Tape::Id> fc_levels;   // r^1..r^K
    std::vector<Mat> alpha;                // self-attention weights per head
    Eigen::RowVectorXd alpha_g;            // pooling weights
  };
  Forward forward(ad::Tape& t, const Sentence& sent, bool train, Rng& rng) const;

  struct LossIds {
    ad::Tape::Id total = -1;
    ad::Tape::Id l_e = -1;  // -1 when the term is absent from the graph
    ad::Tape::Id l_c = -1;
    ad::Tape::Id l_r = -1;
  };
  // Mixed-batch joint loss. Source sentences must carry gold tags; the
  // extraction term covers source only. Ablation switches drop terms from
  // the graph entirely, so their gradients are exactly zero.
  LossIds batch_losses(ad::Tape& t, const std::vector<const Sentence*>& source,
                       const std::vector<const Sentence*>& target, bool train,
                       Rng& rng) const;

  std::vector<BioTag> predict_tags(const Sentence& sent) const;
  Eigen::RowVectorXd predict_categories(const Sentence& sent,
                                        const std::string& domain) const;
  // Attention weights on a deterministic forward pass, one n x n matrix per head.
  std::vector<Mat> attention_maps(const Sentence& sent) const;
  // Pooling weights alpha_g over token positions, deterministic pass.
  Eigen::RowVectorXd pooling_weights(const Sentence& sent) const;

  const ModelConfig& config() const { return cfg_; }
  const EmbeddingTable& embeddings() const { return emb_table_; }
  const std::vector<DomainSpec>& domains() const { return domains_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }
  const Crf& crf() const { return *crf_; }

 private:
  ad::Tape::Id embed(ad::Tape& t, const std::vector<std::string>& tokens) const;

  ModelConfig cfg_;
  EmbeddingTable emb_table_;  // matrix lives in the parameter; table keeps vocab
  std::vector<DomainSpec> domains_;
  nn::ParamStore store_;
  Parameter* emb_param_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<FcStack> fc_;
  std::unique_ptr<Crf> crf_;
  std::unique_ptr<Categorizer> cat_;
  std::unique_ptr<ReconstructionBank> recon_;
};

// Self-describing text checkpoint; parameter values are written as C99
// hexfloats so reload is bit-exact. rng_state carries the training RNG for
// resumable state; pass "" when not training.
void save_checkpoint(const Model& model, const std::string& rng_state,
                     const std::string& path);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  std::string rng_state;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace xaspect

#endif
