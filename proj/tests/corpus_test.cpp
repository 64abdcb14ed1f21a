#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "test_util.hpp"
#include "xaspect/corpus.hpp"
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

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kLabeled =
    "#categories\tfood,service\n"
    "the pasta was great\tN BA N N\tfood\n"
    "waiter was rude and slow\tBA N N N N\tservice\n"
    "nothing to report\tN N N\t-\n"
    "pasta and the waiter\tBA N N BA\tfood,service\n";

const char* kUnlabeled =
    "#categories\tfood,service\n"
    "the pasta was great\t-\tfood\n"
    "noisy room\t-\t-\n";

}  // namespace

TEST_CASE("labeled corpus parses fields, tags and categories") {
  TempFile f("corpus_labeled.tsv", kLabeled);
  const auto c = load_corpus(f.str(), "rest");
  CHECK(c.name == "rest");
  CHECK(c.category_set == std::vector<std::string>{"food", "service"});
  CHECK(c.has_token_labels);
  REQUIRE(c.size() == 4);

  const auto& s0 = c.sentences[0];
  CHECK(s0.tokens == std::vector<std::string>{"the", "pasta", "was", "great"});
  REQUIRE(s0.tags.has_value());
  CHECK((*s0.tags)[1] == BioTag::BA);
  CHECK(s0.categories == std::vector<std::uint8_t>{1, 0});
  CHECK(s0.domain_id == "rest");
  CHECK(s0.gold_spans() == SpanSet{{1, 1}});

  CHECK(c.sentences[2].categories == std::vector<std::uint8_t>{0, 0});
  CHECK(c.sentences[3].categories == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("unlabeled corpus has no tags and empty gold spans") {
  TempFile f("corpus_unlabeled.tsv", kUnlabeled);
  const auto c = load_corpus(f.str(), "lap");
  CHECK_FALSE(c.has_token_labels);
  REQUIRE(c.size() == 2);
  CHECK_FALSE(c.sentences[0].tags.has_value());
  CHECK(c.sentences[0].gold_spans().empty());
}

TEST_CASE("without_tags drops token labels but keeps categories") {
  TempFile f("corpus_wt.tsv", kLabeled);
  const auto c = load_corpus(f.str(), "rest").without_tags();
  CHECK_FALSE(c.has_token_labels);
  for (const auto& s : c.sentences) CHECK_FALSE(s.tags.has_value());
  CHECK(c.sentences[0].categories == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("save and reload is an identity on content") {
  TempFile f("corpus_rt_in.tsv", kLabeled);
  const auto c = load_corpus(f.str(), "rest");
  const auto out_path = (fs::temp_directory_path() / "corpus_rt_out.tsv").string();
  save_corpus(c, out_path);
  const auto c2 = load_corpus(out_path, "rest");
  REQUIRE(c2.size() == c.size());
  CHECK(c2.category_set == c.category_set);
  CHECK(c2.has_token_labels == c.has_token_labels);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c2.sentences[i].tokens == c.sentences[i].tokens);
    CHECK(c2.sentences[i].tags == c.sentences[i].tags);
    CHECK(c2.sentences[i].categories == c.sentences[i].categories);
  }
  // And a second save produces identical bytes.
  const auto out2 = (fs::temp_directory_path() / "corpus_rt_out2.tsv").string();
  save_corpus(c2, out2);
  CHECK(slurp(out_path) == slurp(out2));
  fs::remove(out_path);
  fs::remove(out2);
}

TEST_CASE("parse errors carry path and line number") {
  using testutil::throws_containing;

  TempFile bad_header("corpus_bad_header.tsv", "#cats\tfood\n");
  CHECK(throws_containing<ParseError>(
      [&] { load_corpus(bad_header.str(), "d"); }, ":1:"));

  TempFile two_fields("corpus_two_fields.tsv",
                      "#categories\tfood\na b\tN N\n");
  CHECK(throws_containing<ParseError>(
      [&] { load_corpus(two_fields.str(), "d"); }, ":2:"));

  TempFile bad_tag("corpus_bad_tag.tsv",
                   "#categories\tfood\na b\tN Q\t-\n");
  CHECK_THROWS_AS(load_corpus(bad_tag.str(), "d"), ParseError);

  TempFile tag_count("corpus_tag_count.tsv",
                     "#categories\tfood\na b\tN\t-\n");
  CHECK(throws_containing<ValidationError>(
      [&] { load_corpus(tag_count.str(), "d"); }, "tag count"));

  TempFile bad_cat("corpus_bad_cat.tsv",
                   "#categories\tfood\na b\tN N\tdrinks\n");
  CHECK(throws_containing<ValidationError>(
      [&] { load_corpus(bad_cat.str(), "d"); }, "unknown category"));

  TempFile dup_cat("corpus_dup_cat.tsv", "#categories\tfood,food\n");
  CHECK_THROWS_AS(load_corpus(dup_cat.str(), "d"), ValidationError);

  TempFile no_tokens("corpus_no_tokens.tsv",
                     "#categories\tfood\n \tN\t-\n");
  CHECK_THROWS_AS(load_corpus(no_tokens.str(), "d"), ValidationError);

  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.tsv", "d"), UsageError);
}

TEST_CASE("mixed labeled and unlabeled records are rejected") {
  TempFile f("corpus_mixed.tsv",
             "#categories\tfood\na b\tN N\t-\nc d\t-\t-\n");
  CHECK(testutil::throws_containing<ValidationError>(
      [&] { load_corpus(f.str(), "d"); }, "mixed labeling"));
}

TEST_CASE("split_corpus is deterministic, disjoint and covering") {
  DomainCorpus c;
  c.name = "d";
  c.category_set = {"x"};
  c.has_token_labels = false;
  for (int i = 0; i < 10; ++i) {
    Sentence s;
    s.tokens = {"tok" + std::to_string(i)};
    s.categories = {0};
    s.domain_id = "d";
    c.sentences.push_back(s);
  }

  auto [train, test] = split_corpus(c, 0.8, 7);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  CHECK(train.name == "d");
  CHECK(test.category_set == c.category_set);

  std::set<std::string> seen;
  for (const auto& s : train.sentences) seen.insert(s.tokens[0]);
  for (const auto& s : test.sentences) seen.insert(s.tokens[0]);
  CHECK(seen.size() == 10);

  auto [train2, test2] = split_corpus(c, 0.8, 7);
  for (std::size_t i = 0; i < train.size(); ++i)
    CHECK(train2.sentences[i].tokens == train.sentences[i].tokens);

  auto [train3, test3] = split_corpus(c, 0.8, 8);
  bool same = true;
  for (std::size_t i = 0; i < train.size(); ++i)
    same = same && train3.sentences[i].tokens == train.sentences[i].tokens;
  CHECK_FALSE(same);

  CHECK_THROWS_AS(split_corpus(c, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(split_corpus(c, 1.0, 1), ValidationError);
  DomainCorpus tiny = c;
  tiny.sentences.resize(1);
  CHECK_THROWS_AS(split_corpus(tiny, 0.5, 1), ValidationError);
}
