#ifndef XASPECT_EMBEDDINGS_HPP
#define XASPECT_EMBEDDINGS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace xaspect {

using Mat = Eigen::MatrixXd;

// Pretrained word vectors restricted to the corpus vocabulary, plus an unk
// row (shared by all out-of-file tokens) and an all-zero pad row.
struct EmbeddingTable {
  int dim = 0;
  std::vector<std::string> row_tokens;            // row index -> token, file order
  std::unordered_map<std::string, int> vocab;     // token -> row index
  Mat matrix;                                     // |vocab|+2 x dim
  int unk_index = -1;
  int pad_index = -1;

  int index_of(const std::string& token) const {
    auto it = vocab.find(token);
    return it == vocab.end() ? unk_index : it->second;
  }

  // Row per token; unseen tokens get the unk row. Never fails.
  Mat lookup(const std::vector<std::string>& tokens) const;
};

// Reads a whitespace-delimited text embedding file (token followed by `dim`
// floats; an optional word2vec-style `count dim` first line is honored).
// Keeps only tokens present in `corpus_vocab`. The unk row is drawn uniform
// in [-0.1, 0.1] under `seed`; the pad row is zero.
EmbeddingTable load_embeddings(const std::string& path,
                               const std::set<std::string>& corpus_vocab,
                               int dim,
                               std::uint64_t seed);

// Writes a random embedding file covering `vocab` (desk-scale stand-in for
// pretrained vectors); values uniform in [-0.5, 0.5] under `seed`.
void write_random_embeddings(const std::string& path,
                             const std::set<std::string>& vocab,
                             int dim,
                             std::uint64_t seed);

}  // namespace xaspect

#endif
