#include "xaspect/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "xaspect/errors.hpp"
#include "xaspect/metrics.hpp"
#include "xaspect/synth.hpp"
#include "xaspect/trainer.hpp"

namespace xaspect {

namespace {

constexpr std::uint64_t kEmbStream = 5;

std::string lower_ascii(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::set<std::string> corpus_vocab(const std::vector<const DomainCorpus*>& corpora,
                                   bool lowercase) {
  std::set<std::string> vocab;
  for (const DomainCorpus* c : corpora)
    for (const Sentence& s : c->sentences)
      for (const std::string& tok : s.tokens)
        vocab.insert(lowercase ? lower_ascii(tok) : tok);
  return vocab;
}

// Model hyperparameter flags shared by train/ablate/sweep. Defaults come from
// ModelConfig, optionally replaced by --config, then by explicit flags.
struct ModelFlags {
  std::string config_path;
  ModelConfig v;  // flag bindings
  std::string recon_source = "on";

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--seed", v.seed, "master RNG seed");
    cmd->add_option("--lambda", v.lambda, "categorization loss weight");
    cmd->add_option("--beta", v.beta, "reconstruction loss weight");
    cmd->add_option("--recon-levels", v.recon_levels, "FC levels decoded (R)");
    cmd->add_option("--recon-source", recon_source,
                    "include source in reconstruction loss (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_flag("--freeze-embeddings", v.freeze_embeddings,
                  "do not update word vectors");
    cmd->add_option("--fc-layers", v.fc_layers, "FC stack depth (K)");
    cmd->add_option("--lstm-layers", v.lstm_layers, "recurrent layers");
    cmd->add_option("--heads", v.heads, "attention heads (0 disables)");
    cmd->add_option("--emb-dim", v.embedding_dim, "word vector width");
    cmd->add_option("--lstm-total", v.lstm_total, "token width, both directions");
    cmd->add_option("--fc-dim", v.fc_dim, "FC layer width");
    cmd->add_option("--epochs", v.epochs, "training epochs");
    cmd->add_option("--lr", v.lr, "Adam learning rate");
    cmd->add_option("--batch", v.batch, "mixed batch size");
    cmd->add_option("--dropout", v.dropout, "dropout rate");
    cmd->add_option("--clip", v.clip_norm, "gradient clip norm (<=0 off)");
    cmd->add_flag("--lowercase", v.lowercase, "case-fold tokens before lookup");
  }

  ModelConfig resolve(const CLI::App* cmd) const {
    ModelConfig cfg;
    if (!config_path.empty()) cfg = ModelConfig::load_file(config_path);
    auto over = [&](const char* flag, auto member) {
      if (cmd->count(flag)) cfg.*member = v.*member;
    };
    over("--seed", &ModelConfig::seed);
    over("--lambda", &ModelConfig::lambda);
    over("--beta", &ModelConfig::beta);
    over("--recon-levels", &ModelConfig::recon_levels);
    over("--freeze-embeddings", &ModelConfig::freeze_embeddings);
    over("--fc-layers", &ModelConfig::fc_layers);
    over("--lstm-layers", &ModelConfig::lstm_layers);
    over("--heads", &ModelConfig::heads);
    over("--emb-dim", &ModelConfig::embedding_dim);
    over("--lstm-total", &ModelConfig::lstm_total);
    over("--fc-dim", &ModelConfig::fc_dim);
    over("--epochs", &ModelConfig::epochs);
    over("--lr", &ModelConfig::lr);
    over("--batch", &ModelConfig::batch);
    over("--dropout", &ModelConfig::dropout);
    over("--clip", &ModelConfig::clip_norm);
    over("--lowercase", &ModelConfig::lowercase);
    if (cmd->count("--recon-source")) cfg.itm_source_on = recon_source == "on";
    cfg.validate();
    return cfg;
  }
};

struct DataFlags {
  std::string source, target, emb, target_test;
  std::string source_name = "source", target_name = "target";

  void attach(CLI::App* cmd, bool need_test) {
    cmd->add_option("--source", source, "labeled source corpus")->required();
    cmd->add_option("--target", target, "weakly-labeled target corpus")->required();
    cmd->add_option("--emb", emb, "pretrained embedding file")->required();
    auto* t = cmd->add_option("--target-test", target_test,
                              "labeled target test corpus");
    if (need_test) t->required();
    cmd->add_option("--source-name", source_name, "source domain id");
    cmd->add_option("--target-name", target_name, "target domain id");
  }
};

struct TrainingInputs {
  DomainCorpus source, target;
  EmbeddingTable table;
};

TrainingInputs load_training_inputs(const DataFlags& d, const ModelConfig& cfg) {
  TrainingInputs in;
  in.source = load_corpus(d.source, d.source_name);
  in.target = load_corpus(d.target, d.target_name);
  if (!in.source.has_token_labels)
    throw ValidationError("source corpus must carry gold tags: " + d.source);
  const std::set<std::string> vocab =
      corpus_vocab({&in.source, &in.target}, cfg.lowercase);
  in.table = load_embeddings(d.emb, vocab, cfg.embedding_dim,
                             mix_seed(cfg.seed, kEmbStream));
  return in;
}

Model build_model(const ModelConfig& cfg, const TrainingInputs& in) {
  return Model(cfg, in.table,
               {{in.source.name, static_cast<int>(in.source.category_set.size())},
                {in.target.name, static_cast<int>(in.target.category_set.size())}});
}

void write_f1_report(std::ostream& out, const F1Report& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "precision %.6f\nrecall %.6f\nf1 %.6f\n"
                "true_positives %ld\npredicted %ld\ngold %ld\n",
                r.precision, r.recall, r.f1, r.true_positives,
                r.predicted_count, r.gold_count);
  out << buf;
}

void check_domain_compatible(const Model& model, const DomainCorpus& corpus) {
  for (const auto& [name, ncats] : model.domains()) {
    if (name != corpus.name) continue;
    if (ncats != static_cast<int>(corpus.category_set.size()))
      throw ValidationError("corpus " + corpus.name + " has " +
                            std::to_string(corpus.category_set.size()) +
                            " categories but the checkpoint's head bank has " +
                            std::to_string(ncats));
    return;
  }
  throw ValidationError("checkpoint has no category heads for domain '" +
                        corpus.name + "'");
}

// --- verbs ---

int cmd_train(const DataFlags& data, const ModelFlags& mf, const CLI::App* cmd,
              const std::string& out_prefix) {
  const ModelConfig cfg = mf.resolve(cmd);
  TrainingInputs in = load_training_inputs(data, cfg);
  Model model = build_model(cfg, in);

  std::ofstream losses(out_prefix + ".losses.txt");
  if (!losses) throw ValidationError("cannot write " + out_prefix + ".losses.txt");
  TrainingState state = fit(model, in.source, in.target, &losses);
  save_checkpoint(model, state.rng_state, out_prefix + ".ckpt");

  if (!data.target_test.empty()) {
    DomainCorpus test = load_corpus(data.target_test, data.target_name);
    check_domain_compatible(model, test);
    const F1Report r = evaluate_extraction(model, test);
    std::ofstream metrics(out_prefix + ".metrics.txt");
    if (!metrics)
      throw ValidationError("cannot write " + out_prefix + ".metrics.txt");
    write_f1_report(metrics, r);
    write_f1_report(std::cout, r);
  }
  std::cout << "checkpoint " << out_prefix << ".ckpt\n";
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& corpus_path,
             const std::string& domain) {
  LoadedCheckpoint lc = load_checkpoint(ckpt_path);
  DomainCorpus corpus = load_corpus(corpus_path, domain);
  check_domain_compatible(*lc.model, corpus);
  write_f1_report(std::cout, evaluate_extraction(*lc.model, corpus));
  return 0;
}

int cmd_attn_report(const std::string& ckpt_path, const std::string& corpus_path,
                    const std::string& domain, const std::string& out_path) {
  LoadedCheckpoint lc = load_checkpoint(ckpt_path);
  DomainCorpus corpus = load_corpus(corpus_path, domain);
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write " + out_path);
  out << "sentence\tposition\ttoken\tweight\tgold_aspect\n";
  char buf[64];
  for (std::size_t si = 0; si < corpus.sentences.size(); ++si) {
    const Sentence& s = corpus.sentences[si];
    const Eigen::RowVectorXd w = lc.model->pooling_weights(s);
    std::vector<int> in_gold(s.tokens.size(), 0);
    for (const Span& sp : s.gold_spans())
      for (int i = sp.first; i <= sp.second; ++i)
        in_gold[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6f", w(static_cast<Eigen::Index>(i)));
      out << si << "\t" << i << "\t" << s.tokens[i] << "\t" << buf << "\t";
      if (s.tags)
        out << in_gold[i];
      else
        out << "-";
      out << "\n";
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

struct SettingScore {
  std::string name;
  double precision = 0, recall = 0;  // seed means
  std::vector<double> f1s;
};

void write_setting_line(std::ostream& out, const SettingScore& s) {
  std::vector<F1Report> reports;
  for (double f : s.f1s) {
    F1Report r;
    r.f1 = f;
    reports.push_back(r);
  }
  const SplitSummary sum = aggregate_splits(reports);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%s P %.6f R %.6f F1 %.6f sd %.6f (%zu seeds)\n",
                s.name.c_str(), s.precision, s.recall, sum.mean, sum.sd,
                s.f1s.size());
  out << buf;
}

// Train+evaluate one configuration over `seeds` seeds starting at cfg.seed.
SettingScore run_setting(const std::string& name, ModelConfig cfg,
                         const DataFlags& data, int seeds) {
  SettingScore score;
  score.name = name;
  const std::uint64_t base_seed = cfg.seed;
  for (int si = 0; si < seeds; ++si) {
    cfg.seed = base_seed + static_cast<std::uint64_t>(si);
    TrainingInputs in = load_training_inputs(data, cfg);
    Model model = build_model(cfg, in);
    fit(model, in.source, in.target, nullptr);
    DomainCorpus test = load_corpus(data.target_test, data.target_name);
    const F1Report r = evaluate_extraction(model, test);
    score.precision += r.precision / seeds;
    score.recall += r.recall / seeds;
    score.f1s.push_back(r.f1);
  }
  return score;
}

int cmd_ablate(const DataFlags& data, const ModelFlags& mf, const CLI::App* cmd,
               const std::string& which, int seeds, const std::string& out_path) {
  const ModelConfig base = mf.resolve(cmd);
  std::vector<std::string> names;
  if (which == "all")
    names = ablation_names();
  else
    names.push_back(which);

  std::ostringstream report;
  std::vector<SettingScore> scores;
  for (const std::string& name : names) {
    scores.push_back(run_setting(name, apply_ablation(base, name), data, seeds));
    write_setting_line(report, scores.back());
  }
  if (seeds >= 2 && scores.size() > 1 && scores.front().name == "full") {
    for (std::size_t i = 1; i < scores.size(); ++i) {
      const TTestResult t = paired_t_test(scores[0].f1s, scores[i].f1s);
      char buf[160];
      std::snprintf(buf, sizeof buf, "t-test full vs %s: t %.4f p %.6f\n",
                    scores[i].name.c_str(), t.t, t.p);
      report << buf;
    }
  }
  std::cout << report.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot write " + out_path);
    out << report.str();
  }
  return 0;
}

int cmd_sweep(const DataFlags& data, const ModelFlags& mf, const CLI::App* cmd,
              const std::string& param, const std::vector<std::string>& values,
              int seeds, const std::string& out_path) {
  const ModelConfig base = mf.resolve(cmd);
  std::ostringstream report;
  for (const std::string& val : values) {
    ModelConfig cfg = base;
    try {
      if (param == "recon-levels") cfg.recon_levels = std::stoi(val);
      else if (param == "heads") cfg.heads = std::stoi(val);
      else if (param == "lstm-layers") cfg.lstm_layers = std::stoi(val);
      else if (param == "fc-layers") cfg.fc_layers = std::stoi(val);
      else if (param == "lambda") cfg.lambda = std::stod(val);
      else if (param == "beta") cfg.beta = std::stod(val);
      else if (param == "lr") cfg.lr = std::stod(val);
      else if (param == "dropout") cfg.dropout = std::stod(val);
      else if (param == "epochs") cfg.epochs = std::stoi(val);
      else
        throw UsageError("unknown sweep parameter: " + param);
    } catch (const std::invalid_argument&) {
      throw UsageError("bad sweep value '" + val + "' for " + param);
    }
    // sweeping FC depth drags the decoded levels along when needed
    if (param == "fc-layers" && cfg.recon_levels > cfg.fc_layers)
      cfg.recon_levels = cfg.fc_layers;
    cfg.validate();
    write_setting_line(report,
                       run_setting(param + "=" + val, cfg, data, seeds));
  }
  std::cout << report.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot write " + out_path);
    out << report.str();
  }
  return 0;
}

int cmd_synth_paired(const std::string& out_dir, std::uint64_t seed,
                     std::size_t train_size, std::size_t test_size) {
  auto [src_spec, tgt_spec] = make_paired_specs(seed);
  src_spec.save_file(out_dir + "/src_spec.json");
  tgt_spec.save_file(out_dir + "/tgt_spec.json");
  save_corpus(generate_synthetic(src_spec, train_size, mix_seed(seed, 10)),
              out_dir + "/src_train.tsv");
  save_corpus(generate_synthetic(src_spec, test_size, mix_seed(seed, 11)),
              out_dir + "/src_test.tsv");
  save_corpus(generate_synthetic(tgt_spec, train_size, mix_seed(seed, 12)),
              out_dir + "/tgt_train.tsv");
  save_corpus(generate_synthetic(tgt_spec, test_size, mix_seed(seed, 13)),
              out_dir + "/tgt_test.tsv");
  std::cout << "wrote paired corpora under " << out_dir << "\n";
  return 0;
}

int cmd_synth_single(const std::string& spec_path, const std::string& out_path,
                     std::size_t size, std::uint64_t seed) {
  const SynthSpec spec = SynthSpec::load_file(spec_path);
  save_corpus(generate_synthetic(spec, size, seed), out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_prepare(const std::string& in_path, const std::string& domain,
                const std::string& train_out, const std::string& test_out,
                double frac, const std::string& emb_out, int emb_dim,
                bool lowercase, std::uint64_t seed) {
  DomainCorpus corpus = load_corpus(in_path, domain);
  std::size_t labeled = corpus.has_token_labels ? corpus.sentences.size() : 0;
  std::cout << "corpus " << in_path << ": " << corpus.sentences.size()
            << " sentences, " << labeled << " token-labeled, "
            << corpus.category_set.size() << " categories\n";
  if (!train_out.empty() || !test_out.empty()) {
    if (train_out.empty() || test_out.empty())
      throw UsageError("--train-out and --test-out go together");
    auto [train, test] = split_corpus(corpus, frac, seed);
    save_corpus(train, train_out);
    save_corpus(test, test_out);
    std::cout << "split " << train.sentences.size() << "/"
              << test.sentences.size() << " into " << train_out << ", "
              << test_out << "\n";
  }
  if (!emb_out.empty()) {
    write_random_embeddings(emb_out, corpus_vocab({&corpus}, lowercase),
                            emb_dim, mix_seed(seed, kEmbStream));
    std::cout << "wrote embeddings " << emb_out << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"weakly-supervised cross-domain aspect term extraction"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "joint training run");
  DataFlags train_data;
  ModelFlags train_mf;
  std::string train_prefix = "run";
  train_data.attach(train, false);
  train_mf.attach(train);
  train->add_option("--out-prefix", train_prefix,
                    "prefix for .ckpt/.losses.txt/.metrics.txt");

  // eval
  auto* eval = app.add_subcommand("eval", "score a checkpoint on a labeled corpus");
  std::string eval_ckpt, eval_corpus, eval_domain = "target";
  eval->add_option("--checkpoint", eval_ckpt)->required();
  eval->add_option("--corpus", eval_corpus)->required();
  eval->add_option("--domain", eval_domain, "domain id used at training time");

  // attn-report
  auto* attn = app.add_subcommand("attn-report", "dump pooling attention weights");
  std::string attn_ckpt, attn_corpus, attn_domain = "target", attn_out;
  attn->add_option("--checkpoint", attn_ckpt)->required();
  attn->add_option("--corpus", attn_corpus)->required();
  attn->add_option("--domain", attn_domain);
  attn->add_option("--out", attn_out)->required();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "run ablation settings");
  DataFlags ablate_data;
  ModelFlags ablate_mf;
  std::string ablate_which = "all", ablate_out;
  int ablate_seeds = 1;
  ablate_data.attach(ablate, true);
  ablate_mf.attach(ablate);
  ablate->add_option("--which", ablate_which,
                     "full, -SCM, -ITM, -ITMs, source-only, or all");
  ablate->add_option("--seeds", ablate_seeds, "seeds per setting")
      ->check(CLI::PositiveNumber);
  ablate->add_option("--out", ablate_out, "also write the report here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "vary one hyperparameter");
  DataFlags sweep_data;
  ModelFlags sweep_mf;
  std::string sweep_param, sweep_out;
  std::vector<std::string> sweep_values;
  int sweep_seeds = 1;
  sweep_data.attach(sweep, true);
  sweep_mf.attach(sweep);
  sweep->add_option("--param", sweep_param, "recon-levels, heads, lstm-layers, ...")
      ->required();
  sweep->add_option("--values", sweep_values, "values to try")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds)->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "also write the report here");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic corpora");
  bool synth_paired = false;
  std::string synth_dir = ".", synth_spec, synth_out;
  std::uint64_t synth_seed = 1;
  std::size_t synth_train = 500, synth_test = 200, synth_size = 100;
  synth->add_flag("--paired", synth_paired, "emit a paired source/target set");
  synth->add_option("--out-dir", synth_dir, "directory for --paired output");
  synth->add_option("--spec", synth_spec, "spec file for single-domain output");
  synth->add_option("--out", synth_out, "corpus path for single-domain output");
  synth->add_option("--size", synth_size, "sentences for single-domain output");
  synth->add_option("--train-size", synth_train);
  synth->add_option("--test-size", synth_test);
  synth->add_option("--seed", synth_seed);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "validate/split a corpus");
  std::string prep_in, prep_domain = "source", prep_train, prep_test, prep_emb;
  double prep_frac = 0.8;
  int prep_emb_dim = 50;
  bool prep_lower = false;
  std::uint64_t prep_seed = 1;
  prepare->add_option("--in", prep_in)->required();
  prepare->add_option("--domain", prep_domain);
  prepare->add_option("--train-out", prep_train);
  prepare->add_option("--test-out", prep_test);
  prepare->add_option("--frac", prep_frac, "train fraction for the split");
  prepare->add_option("--emb-out", prep_emb, "write random embeddings here");
  prepare->add_option("--emb-dim", prep_emb_dim);
  prepare->add_flag("--lowercase", prep_lower);
  prepare->add_option("--seed", prep_seed);

  try {
    app.parse(argc, argv);

    if (train->parsed())
      return cmd_train(train_data, train_mf, train, train_prefix);
    if (eval->parsed()) return cmd_eval(eval_ckpt, eval_corpus, eval_domain);
    if (attn->parsed())
      return cmd_attn_report(attn_ckpt, attn_corpus, attn_domain, attn_out);
    if (ablate->parsed())
      return cmd_ablate(ablate_data, ablate_mf, ablate, ablate_which,
                        ablate_seeds, ablate_out);
    if (sweep->parsed())
      return cmd_sweep(sweep_data, sweep_mf, sweep, sweep_param, sweep_values,
                       sweep_seeds, sweep_out);
    if (synth->parsed()) {
      if (synth_paired)
        return cmd_synth_paired(synth_dir, synth_seed, synth_train, synth_test);
      if (synth_spec.empty() || synth_out.empty())
        throw UsageError("synth needs --paired or both --spec and --out");
      return cmd_synth_single(synth_spec, synth_out, synth_size, synth_seed);
    }
    if (prepare->parsed())
      return cmd_prepare(prep_in, prep_domain, prep_train, prep_test, prep_frac,
                         prep_emb, prep_emb_dim, prep_lower, prep_seed);
    throw UsageError("no subcommand given");
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace xaspect
