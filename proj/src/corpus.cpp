#include "xaspect/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "xaspect/errors.hpp"
#include "xaspect/rng.hpp"

namespace xaspect {

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

DomainCorpus DomainCorpus::without_tags() const {
  DomainCorpus out = *this;
  out.has_token_labels = false;
  for (auto& s : out.sentences) s.tags.reset();
  return out;
}

DomainCorpus load_corpus(const std::string& path, const std::string& domain_name) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open corpus file: " + path);

  DomainCorpus corpus;
  corpus.name = domain_name;

  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ":1: empty file, expected '#categories' header");
  auto header = split_on(line, '\t');
  if (header.size() != 2 || header[0] != "#categories")
    throw ParseError(path + ":1: expected '#categories<TAB>name1,name2,...'");
  corpus.category_set = split_on(header[1], ',');
  std::unordered_map<std::string, std::size_t> cat_index;
  for (std::size_t i = 0; i < corpus.category_set.size(); ++i) {
    if (corpus.category_set[i].empty())
      throw ParseError(path + ":1: empty category name in header");
    if (!cat_index.emplace(corpus.category_set[i], i).second)
      throw ValidationError(path + ":1: duplicate category name '" + corpus.category_set[i] + "'");
  }

  int labeled = 0, unlabeled = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    auto fields = split_on(line, '\t');
    if (fields.size() != 3)
      throw ParseError(where + "expected 3 tab-separated fields, got " +
                       std::to_string(fields.size()));

    Sentence sent;
    sent.domain_id = domain_name;
    sent.tokens = split_ws(fields[0]);
    if (sent.tokens.empty()) throw ValidationError(where + "record has no tokens");

    if (fields[1] == "-") {
      ++unlabeled;
    } else {
      std::vector<BioTag> tags;
      for (const auto& t : split_ws(fields[1])) {
        try {
          tags.push_back(bio_tag_from_string(t));
        } catch (const ParseError& e) {
          throw ParseError(where + e.what());
        }
      }
      if (tags.size() != sent.tokens.size())
        throw ValidationError(where + "tag count " + std::to_string(tags.size()) +
                              " does not match token count " + std::to_string(sent.tokens.size()));
      sent.tags = std::move(tags);
      ++labeled;
    }

    sent.categories.assign(corpus.category_set.size(), 0);
    if (fields[2] != "-") {
      for (const auto& c : split_on(fields[2], ',')) {
        auto it = cat_index.find(c);
        if (it == cat_index.end())
          throw ValidationError(where + "unknown category name '" + c + "'");
        sent.categories[it->second] = 1;
      }
    }
    corpus.sentences.push_back(std::move(sent));
  }

  // The DomainCorpus invariant admits only fully labeled or fully unlabeled
  // corpora, so a mixed file cannot be represented and is rejected.
  if (labeled > 0 && unlabeled > 0)
    throw ValidationError(path + ": mixed labeling (" + std::to_string(labeled) + " labeled, " +
                          std::to_string(unlabeled) + " unlabeled records)");
  corpus.has_token_labels = labeled > 0;
  return corpus;
}

void save_corpus(const DomainCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write corpus file: " + path);
  out << "#categories\t";
  for (std::size_t i = 0; i < corpus.category_set.size(); ++i) {
    if (i) out << ',';
    out << corpus.category_set[i];
  }
  out << '\n';
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out << ' ';
      out << s.tokens[i];
    }
    out << '\t';
    if (s.tags) {
      for (std::size_t i = 0; i < s.tags->size(); ++i) {
        if (i) out << ' ';
        out << to_string((*s.tags)[i]);
      }
    } else {
      out << '-';
    }
    out << '\t';
    bool any = false;
    for (std::size_t i = 0; i < s.categories.size(); ++i) {
      if (!s.categories[i]) continue;
      if (any) out << ',';
      out << corpus.category_set[i];
      any = true;
    }
    if (!any) out << '-';
    out << '\n';
  }
}

std::pair<DomainCorpus, DomainCorpus> split_corpus(const DomainCorpus& corpus,
                                                   double train_fraction,
                                                   std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("train_fraction must be in (0, 1)");
  const std::size_t n = corpus.sentences.size();
  if (n < 2) throw ValidationError("cannot split a corpus with fewer than 2 sentences");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * double(n)));
  DomainCorpus train, test;
  train.name = test.name = corpus.name;
  train.category_set = test.category_set = corpus.category_set;
  train.has_token_labels = test.has_token_labels = corpus.has_token_labels;
  for (std::size_t i = 0; i < n; ++i)
    (i < n_train ? train : test).sentences.push_back(corpus.sentences[order[i]]);
  return {std::move(train), std::move(test)};
}

}  // namespace xaspect
