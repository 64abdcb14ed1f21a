#include "xaspect/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "xaspect/errors.hpp"

namespace xaspect {

using nlohmann::json;

void ModelConfig::validate() const {
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (lstm_total < 2 || lstm_total % 2 != 0)
    throw ConfigError("lstm_total must be a positive even number");
  if (fc_layers < 1) throw ConfigError("fc_layers must be >= 1");
  if (fc_dim < 1) throw ConfigError("fc_dim must be positive");
  if (recon_levels < 0) throw ConfigError("recon_levels must be >= 0");
  if (recon_levels > fc_layers)
    throw ConfigError("recon_levels cannot exceed fc_layers");
  if (lambda < 0) throw ConfigError("lambda must be >= 0");
  if (beta < 0) throw ConfigError("beta must be >= 0");
  if (lr <= 0) throw ConfigError("lr must be positive");
  if (batch < 2 || batch % 2 != 0)
    throw ConfigError("batch must be an even number >= 2 (half per domain)");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
  encoder().validate();  // heads/lstm compatibility
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string ModelConfig::to_json() const {
  json j{
      {"embedding_dim", embedding_dim},
      {"lstm_layers", lstm_layers},
      {"lstm_total", lstm_total},
      {"heads", heads},
      {"fc_layers", fc_layers},
      {"fc_dim", fc_dim},
      {"recon_levels", recon_levels},
      {"lambda", lambda},
      {"beta", beta},
      {"lr", lr},
      {"batch", batch},
      {"epochs", epochs},
      {"dropout", dropout},
      {"seed", seed},
      {"clip_norm", clip_norm},
      {"scm_on", scm_on},
      {"itm_on", itm_on},
      {"itm_source_on", itm_source_on},
      {"freeze_embeddings", freeze_embeddings},
      {"lowercase", lowercase},
  };
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  static const char* known[] = {
      "embedding_dim", "lstm_layers", "lstm_total", "heads", "fc_layers",
      "fc_dim", "recon_levels", "lambda", "beta", "lr", "batch", "epochs",
      "dropout", "seed", "clip_norm", "scm_on", "itm_on", "itm_source_on",
      "freeze_embeddings", "lowercase",
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown config key: " + it.key());
  }

  ModelConfig c;
  try {
    read_field(j, "embedding_dim", c.embedding_dim);
    read_field(j, "lstm_layers", c.lstm_layers);
    read_field(j, "lstm_total", c.lstm_total);
    read_field(j, "heads", c.heads);
    read_field(j, "fc_layers", c.fc_layers);
    read_field(j, "fc_dim", c.fc_dim);
    read_field(j, "recon_levels", c.recon_levels);
    read_field(j, "lambda", c.lambda);
    read_field(j, "beta", c.beta);
    read_field(j, "lr", c.lr);
    read_field(j, "batch", c.batch);
    read_field(j, "epochs", c.epochs);
    read_field(j, "dropout", c.dropout);
    read_field(j, "seed", c.seed);
    read_field(j, "clip_norm", c.clip_norm);
    read_field(j, "scm_on", c.scm_on);
    read_field(j, "itm_on", c.itm_on);
    read_field(j, "itm_source_on", c.itm_source_on);
    read_field(j, "freeze_embeddings", c.freeze_embeddings);
    read_field(j, "lowercase", c.lowercase);
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config field has wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

ModelConfig ModelConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void ModelConfig::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << to_json() << "\n";
}

}  // namespace xaspect
