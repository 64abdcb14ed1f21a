#include "xaspect/embeddings.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xaspect/errors.hpp"
#include "xaspect/rng.hpp"

namespace xaspect {

namespace {

bool looks_like_count_header(const std::string& line) {
  std::istringstream is(line);
  std::string a, b, rest;
  if (!(is >> a >> b) || (is >> rest)) return false;
  auto is_uint = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  return is_uint(a) && is_uint(b);
}

}  // namespace

Mat EmbeddingTable::lookup(const std::vector<std::string>& tokens) const {
  Mat out(static_cast<Eigen::Index>(tokens.size()), dim);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = matrix.row(index_of(tokens[i]));
  return out;
}

EmbeddingTable load_embeddings(const std::string& path,
                               const std::set<std::string>& corpus_vocab,
                               int dim,
                               std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open embedding file: " + path);
  if (dim <= 0) throw ConfigError("embedding dim must be positive");

  std::vector<std::string> kept_tokens;
  std::vector<std::vector<double>> kept_rows;

  std::string line;
  int line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (first_content_line && looks_like_count_header(line)) {
      first_content_line = false;
      std::istringstream is(line);
      long long count, file_dim;
      is >> count >> file_dim;
      if (file_dim != dim)
        throw ParseError(where + "file declares dim " + std::to_string(file_dim) +
                         " but " + std::to_string(dim) + " was requested");
      continue;
    }
    first_content_line = false;

    std::istringstream is(line);
    std::string token;
    is >> token;
    const bool keep = corpus_vocab.count(token) > 0;
    std::vector<double> row;
    row.reserve(keep ? dim : 0);
    std::string field;
    int count = 0;
    while (is >> field) {
      ++count;
      if (count > dim)
        throw ParseError(where + "too many values for token '" + token + "' (expected " +
                         std::to_string(dim) + ")");
      if (keep) {
        std::size_t pos = 0;
        double v;
        try {
          v = std::stod(field, &pos);
        } catch (const std::exception&) {
          throw ParseError(where + "bad float '" + field + "'");
        }
        if (pos != field.size()) throw ParseError(where + "bad float '" + field + "'");
        row.push_back(v);
      }
    }
    if (count != dim)
      throw ParseError(where + "expected " + std::to_string(dim) + " values for token '" +
                       token + "', got " + std::to_string(count));
    if (keep) {
      kept_tokens.push_back(token);
      kept_rows.push_back(std::move(row));
    }
  }

  EmbeddingTable table;
  table.dim = dim;
  const auto n = static_cast<Eigen::Index>(kept_tokens.size());
  table.matrix.setZero(n + 2, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    table.vocab.emplace(kept_tokens[static_cast<std::size_t>(i)], static_cast<int>(i));
    for (int j = 0; j < dim; ++j) table.matrix(i, j) = kept_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  table.row_tokens = std::move(kept_tokens);
  table.unk_index = static_cast<int>(n);
  table.pad_index = static_cast<int>(n) + 1;
  Rng rng(seed);
  for (int j = 0; j < dim; ++j) table.matrix(table.unk_index, j) = rng.uniform(-0.1, 0.1);
  // pad row stays zero
  return table;
}

void write_random_embeddings(const std::string& path,
                             const std::set<std::string>& vocab,
                             int dim,
                             std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write embedding file: " + path);
  Rng rng(seed);
  char buf[64];
  for (const auto& token : vocab) {
    out << token;
    for (int j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof buf, " %.6f", rng.uniform(-0.5, 0.5));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace xaspect
