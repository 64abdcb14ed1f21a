#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "test_util.hpp"
#include "xaspect/embeddings.hpp"
#include "xaspect/errors.hpp"

using namespace xaspect;

namespace {

namespace fs = std::filesystem;

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { fs::remove(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("load keeps only corpus vocabulary, in file order") {
  TempFile f("emb_basic.txt",
             "alpha 1.0 2.0\n"
             "beta 3.0 4.0\n"
             "gamma 5.0 6.0\n");
  const auto t = load_embeddings(f.str(), {"gamma", "alpha", "unseen"}, 2, 1);
  CHECK(t.dim == 2);
  REQUIRE(t.row_tokens == std::vector<std::string>{"alpha", "gamma"});
  CHECK(t.matrix.rows() == 4);  // 2 kept + unk + pad
  CHECK(t.matrix(0, 0) == 1.0);
  CHECK(t.matrix(1, 1) == 6.0);
  CHECK(t.index_of("alpha") == 0);
  CHECK(t.index_of("gamma") == 1);
  CHECK(t.index_of("unseen") == t.unk_index);
  CHECK(t.index_of("beta") == t.unk_index);  // in file but not in corpus vocab
  CHECK(t.unk_index == 2);
  CHECK(t.pad_index == 3);
  CHECK(t.matrix.row(t.pad_index).isZero());
  for (int j = 0; j < 2; ++j) {
    CHECK(t.matrix(t.unk_index, j) >= -0.1);
    CHECK(t.matrix(t.unk_index, j) < 0.1);
  }
}

TEST_CASE("word2vec count header is honored and checked") {
  TempFile ok("emb_w2v.txt", "2 3\nfoo 1 2 3\nbar 4 5 6\n");
  const auto t = load_embeddings(ok.str(), {"foo", "bar"}, 3, 1);
  CHECK(t.row_tokens.size() == 2);
  CHECK(t.matrix(1, 2) == 6.0);

  TempFile bad("emb_w2v_bad.txt", "2 4\nfoo 1 2 3 4\n");
  CHECK(testutil::throws_containing<ParseError>(
      [&] { load_embeddings(bad.str(), {"foo"}, 3, 1); }, "declares dim 4"));
}

TEST_CASE("unk row is deterministic under seed") {
  TempFile f("emb_unk.txt", "a 1 1\n");
  const auto t1 = load_embeddings(f.str(), {"a"}, 2, 42);
  const auto t2 = load_embeddings(f.str(), {"a"}, 2, 42);
  const auto t3 = load_embeddings(f.str(), {"a"}, 2, 43);
  CHECK((t1.matrix.array() == t2.matrix.array()).all());
  CHECK_FALSE((t1.matrix.row(t1.unk_index).array() ==
              t3.matrix.row(t3.unk_index).array()).all());
}

TEST_CASE("lookup maps tokens to rows with unk fallback") {
  TempFile f("emb_lookup.txt", "a 1 2\nb 3 4\n");
  const auto t = load_embeddings(f.str(), {"a", "b"}, 2, 1);
  const Mat m = t.lookup({"b", "zzz", "a"});
  REQUIRE(m.rows() == 3);
  CHECK(m(0, 0) == 3.0);
  CHECK(m(2, 1) == 2.0);
  CHECK((m.row(1).array() == t.matrix.row(t.unk_index).array()).all());
}

TEST_CASE("malformed embedding lines are rejected with location") {
  TempFile short_row("emb_short.txt", "a 1.0\n");
  CHECK(testutil::throws_containing<ParseError>(
      [&] { load_embeddings(short_row.str(), {"a"}, 2, 1); }, "expected 2 values"));

  TempFile long_row("emb_long.txt", "a 1 2 3\n");
  CHECK(testutil::throws_containing<ParseError>(
      [&] { load_embeddings(long_row.str(), {"a"}, 2, 1); }, "too many values"));

  TempFile bad_float("emb_badf.txt", "a 1.0 oops\n");
  CHECK(testutil::throws_containing<ParseError>(
      [&] { load_embeddings(bad_float.str(), {"a"}, 2, 1); }, "bad float"));

  // Rows for out-of-vocab tokens still have their shape checked.
  TempFile bad_other("emb_bad_other.txt", "skipme 1\nkeep 1 2\n");
  CHECK_THROWS_AS(load_embeddings(bad_other.str(), {"keep"}, 2, 1), ParseError);

  CHECK_THROWS_AS(load_embeddings("/nonexistent/vec.txt", {"a"}, 2, 1), UsageError);
  TempFile ok("emb_dim0.txt", "a 1 2\n");
  CHECK_THROWS_AS(load_embeddings(ok.str(), {"a"}, 0, 1), ConfigError);
}

TEST_CASE("empty intersection still yields usable unk and pad rows") {
  TempFile f("emb_empty.txt", "x 1 2\n");
  const auto t = load_embeddings(f.str(), {"absent"}, 2, 1);
  CHECK(t.row_tokens.empty());
  CHECK(t.matrix.rows() == 2);
  CHECK(t.unk_index == 0);
  CHECK(t.pad_index == 1);
  const Mat m = t.lookup({"absent"});
  CHECK((m.row(0).array() == t.matrix.row(0).array()).all());
}

TEST_CASE("write_random_embeddings round-trips through load") {
  const auto path = (fs::temp_directory_path() / "emb_rand.txt").string();
  const std::set<std::string> vocab = {"pear", "apple", "quince"};
  write_random_embeddings(path, vocab, 4, 9);
  const auto t = load_embeddings(path, vocab, 4, 1);
  CHECK(t.row_tokens == std::vector<std::string>{"apple", "pear", "quince"});
  CHECK(t.matrix.topRows(3).cwiseAbs().maxCoeff() <= 0.5);

  // Deterministic: same seed, same bytes.
  const auto path2 = (fs::temp_directory_path() / "emb_rand2.txt").string();
  write_random_embeddings(path2, vocab, 4, 9);
  std::ifstream a(path), b(path2);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  fs::remove(path);
  fs::remove(path2);
}
