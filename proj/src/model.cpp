#include "xaspect/model.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "xaspect/errors.hpp"

namespace xaspect {

namespace {

constexpr std::uint64_t kInitStream = 1;

std::string lower_ascii(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Model::Model(const ModelConfig& config, EmbeddingTable embeddings,
             const std::vector<DomainSpec>& domains)
    : cfg_(config), emb_table_(std::move(embeddings)), domains_(domains) {
  cfg_.validate();
  if (emb_table_.dim != cfg_.embedding_dim)
    throw ConfigError("embedding table width does not match embedding_dim");
  if (domains_.empty()) throw ConfigError("model needs at least one domain");

  Rng rng(mix_seed(cfg_.seed, kInitStream));

  const Eigen::Index rows = emb_table_.matrix.rows();
  emb_param_ = &store_.make("embeddings", rows, cfg_.embedding_dim);
  emb_param_->value = std::move(emb_table_.matrix);
  emb_param_->trainable = !cfg_.freeze_embeddings;
  emb_table_.matrix.resize(0, 0);

  const EncoderConfig enc_cfg = cfg_.encoder();
  encoder_ = std::make_unique<Encoder>(store_, enc_cfg, rng);
  fc_ = std::make_unique<FcStack>(store_, enc_cfg.attended_dim(), cfg_.fc_layers,
                                  cfg_.fc_dim, rng);
  crf_ = std::make_unique<Crf>(store_, cfg_.fc_dim, rng);
  cat_ = std::make_unique<Categorizer>(store_, enc_cfg.attended_dim(), rng);
  for (const auto& [name, ncats] : domains_)
    cat_->add_domain(store_, name, ncats, rng);
  recon_ = std::make_unique<ReconstructionBank>(store_, cfg_.recon_levels,
                                                cfg_.fc_dim, cfg_.fc_dim,
                                                enc_cfg.attended_dim(), rng);
}

ad::Tape::Id Model::embed(ad::Tape& t, const std::vector<std::string>& tokens) const {
  std::vector<int> idx;
  idx.reserve(tokens.size());
  for (const std::string& tok : tokens)
    idx.push_back(emb_table_.index_of(cfg_.lowercase ? lower_ascii(tok) : tok));
  return t.gather_rows(t.param(*emb_param_), std::move(idx));
}

Model::Forward Model::forward(ad::Tape& t, const Sentence& sent, bool train,
                              Rng& rng) const {
  EncoderOut enc = encoder_->encode(t, embed(t, sent.tokens), train, rng);
  Forward f;
  f.alpha = std::move(enc.alpha);
  f.fc_levels = fc_->apply(t, enc.attended);
  f.emissions = crf_->emissions(t, f.fc_levels.back());
  Categorizer::Pooled pooled = cat_->sentence_vector(t, enc.attended);
  f.s = pooled.s;
  f.alpha_g = std::move(pooled.alpha_g);
  return f;
}

namespace {

ad::Tape::Id sum_ids(ad::Tape& t, const std::vector<ad::Tape::Id>& ids) {
  ad::Tape::Id acc = ids.front();
  for (std::size_t i = 1; i < ids.size(); ++i) acc = t.add(acc, ids[i]);
  return acc;
}

ad::Tape::Id mean_ids(ad::Tape& t, const std::vector<ad::Tape::Id>& ids) {
  return t.scale(sum_ids(t, ids), 1.0 / static_cast<double>(ids.size()));
}

}  // namespace

Model::LossIds Model::batch_losses(ad::Tape& t,
                                   const std::vector<const Sentence*>& source,
                                   const std::vector<const Sentence*>& target,
                                   bool train, Rng& rng) const {
  if (source.empty() && target.empty())
    throw ValidationError("cannot build losses for an empty batch");
  const bool scm = cfg_.scm_on;
  const bool itm = cfg_.itm_on && recon_->levels() > 0;

  std::vector<ad::Tape::Id> nll, bce_src, bce_tgt, rec_src, rec_tgt;
  auto run_side = [&](const std::vector<const Sentence*>& side, bool is_source) {
    for (const Sentence* sent : side) {
      Forward f = forward(t, *sent, train, rng);
      if (is_source) {
        if (!sent->tags)
          throw ValidationError("extraction loss needs gold tags on every source sentence");
        nll.push_back(crf_->nll(t, f.emissions, *sent->tags));
      }
      if (scm) {
        ad::Tape::Id lg = cat_->logits(t, f.s, sent->domain_id);
        (is_source ? bce_src : bce_tgt).push_back(cat_->bce(t, lg, sent->categories));
      }
      if (itm && (is_source ? cfg_.itm_source_on : true))
        (is_source ? rec_src : rec_tgt)
            .push_back(recon_->sentence_loss(t, f.s, f.fc_levels));
    }
  };
  run_side(source, true);
  if (scm || itm) run_side(target, false);  // target feeds no other term

  LossIds out;
  if (!nll.empty()) out.l_e = mean_ids(t, nll);
  if (!bce_src.empty() && !bce_tgt.empty())
    out.l_c = t.add(mean_ids(t, bce_src), mean_ids(t, bce_tgt));
  else if (!bce_src.empty())
    out.l_c = mean_ids(t, bce_src);
  else if (!bce_tgt.empty())
    out.l_c = mean_ids(t, bce_tgt);
  if (!rec_src.empty() && !rec_tgt.empty())
    out.l_r = t.add(mean_ids(t, rec_src), mean_ids(t, rec_tgt));
  else if (!rec_src.empty())
    out.l_r = mean_ids(t, rec_src);
  else if (!rec_tgt.empty())
    out.l_r = mean_ids(t, rec_tgt);

  ad::Tape::Id total = out.l_e;
  if (out.l_c >= 0) {
    ad::Tape::Id term = t.scale(out.l_c, cfg_.lambda);
    total = total < 0 ? term : t.add(total, term);
  }
  if (out.l_r >= 0) {
    ad::Tape::Id term = t.scale(out.l_r, cfg_.beta);
    total = total < 0 ? term : t.add(total, term);
  }
  if (total < 0) throw ValidationError("batch contributed no loss terms");
  out.total = total;
  return out;
}

std::vector<BioTag> Model::predict_tags(const Sentence& sent) const {
  ad::Tape t;
  Rng rng(0);  // unused: deterministic pass
  Forward f = forward(t, sent, false, rng);
  return crf_->decode(t.value(f.emissions));
}

Eigen::RowVectorXd Model::predict_categories(const Sentence& sent,
                                             const std::string& domain) const {
  ad::Tape t;
  Rng rng(0);
  Forward f = forward(t, sent, false, rng);
  return t.value(t.sigmoid(cat_->logits(t, f.s, domain))).row(0);
}

std::vector<Mat> Model::attention_maps(const Sentence& sent) const {
  ad::Tape t;
  Rng rng(0);
  return forward(t, sent, false, rng).alpha;
}

Eigen::RowVectorXd Model::pooling_weights(const Sentence& sent) const {
  ad::Tape t;
  Rng rng(0);
  return forward(t, sent, false, rng).alpha_g;
}

// --- checkpoint io ---

namespace {

void write_mat(std::FILE* f, const Mat& m) {
  char buf[40];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%a", m(r, c));
      std::fputs(c == 0 ? "" : " ", f);
      std::fputs(buf, f);
    }
    std::fputc('\n', f);
  }
}

std::string next_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": truncated checkpoint");
  return line;
}

void read_mat(std::istream& in, const std::string& path, Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const std::string line = next_line(in, path);
    const char* p = line.c_str();
    char* end = nullptr;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = std::strtod(p, &end);
      if (end == p)
        throw ParseError(path + ": malformed value in parameter row");
      m(r, c) = v;
      p = end;
    }
  }
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& rng_state,
                     const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ValidationError("cannot write checkpoint: " + path);
  const std::string cfg =
      nlohmann::json::parse(model.config().to_json()).dump();
  std::fprintf(f, "xaspect-checkpoint v1\n");
  std::fprintf(f, "config %s\n", cfg.c_str());
  std::fprintf(f, "domains %zu\n", model.domains().size());
  for (const auto& [name, ncats] : model.domains())
    std::fprintf(f, "%s %d\n", name.c_str(), ncats);
  const EmbeddingTable& table = model.embeddings();
  std::fprintf(f, "vocab %zu %d\n", table.row_tokens.size(), table.dim);
  for (const std::string& tok : table.row_tokens)
    std::fprintf(f, "%s\n", tok.c_str());
  std::fprintf(f, "rng\n%s\n", rng_state.c_str());
  std::fprintf(f, "params %zu\n", model.params().all().size());
  for (const auto& p : model.params().all()) {
    std::fprintf(f, "%s %ld %ld\n", p->name.c_str(),
                 static_cast<long>(p->value.rows()),
                 static_cast<long>(p->value.cols()));
    write_mat(f, p->value);
  }
  std::fprintf(f, "end\n");
  std::fclose(f);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open checkpoint: " + path);

  if (next_line(in, path) != "xaspect-checkpoint v1")
    throw ParseError(path + ": not a checkpoint file");

  std::string line = next_line(in, path);
  if (line.rfind("config ", 0) != 0)
    throw ParseError(path + ": expected config line");
  ModelConfig cfg = ModelConfig::from_json(line.substr(7));

  line = next_line(in, path);
  std::size_t ndomains = 0;
  if (std::sscanf(line.c_str(), "domains %zu", &ndomains) != 1)
    throw ParseError(path + ": expected domains line");
  std::vector<Model::DomainSpec> domains;
  for (std::size_t i = 0; i < ndomains; ++i) {
    std::istringstream ls(next_line(in, path));
    std::string name;
    int ncats = 0;
    if (!(ls >> name >> ncats))
      throw ParseError(path + ": malformed domain line");
    domains.emplace_back(name, ncats);
  }

  line = next_line(in, path);
  std::size_t vocab_n = 0;
  int dim = 0;
  if (std::sscanf(line.c_str(), "vocab %zu %d", &vocab_n, &dim) != 2)
    throw ParseError(path + ": expected vocab line");
  EmbeddingTable table;
  table.dim = dim;
  table.row_tokens.reserve(vocab_n);
  for (std::size_t i = 0; i < vocab_n; ++i) {
    table.row_tokens.push_back(next_line(in, path));
    table.vocab.emplace(table.row_tokens.back(), static_cast<int>(i));
  }
  table.unk_index = static_cast<int>(vocab_n);
  table.pad_index = static_cast<int>(vocab_n) + 1;
  table.matrix = Mat::Zero(static_cast<Eigen::Index>(vocab_n) + 2, dim);

  if (next_line(in, path) != "rng")
    throw ParseError(path + ": expected rng line");
  std::string rng_state = next_line(in, path);

  LoadedCheckpoint out;
  out.model = std::make_unique<Model>(cfg, std::move(table), domains);
  out.rng_state = std::move(rng_state);

  line = next_line(in, path);
  std::size_t nparams = 0;
  if (std::sscanf(line.c_str(), "params %zu", &nparams) != 1)
    throw ParseError(path + ": expected params line");
  if (nparams != out.model->params().all().size())
    throw ParseError(path + ": parameter count does not match configuration");
  for (std::size_t i = 0; i < nparams; ++i) {
    std::istringstream ls(next_line(in, path));
    std::string name;
    long rows = 0, cols = 0;
    if (!(ls >> name >> rows >> cols))
      throw ParseError(path + ": malformed parameter header");
    Parameter* p = out.model->params().find(name);
    if (!p) throw ParseError(path + ": unknown parameter " + name);
    if (p->value.rows() != rows || p->value.cols() != cols)
      throw ParseError(path + ": shape mismatch for parameter " + name);
    read_mat(in, path, p->value);
  }
  if (next_line(in, path) != "end")
    throw ParseError(path + ": missing end marker");
  return out;
}

}  // namespace xaspect
