#ifndef XASPECT_CORPUS_HPP
#define XASPECT_CORPUS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xaspect/bio.hpp"

namespace xaspect {

// One review sentence. `categories` is a multi-hot vector over the owning
// domain's category set (header order); `tags` is present only in corpora
// with token-level labels.
struct Sentence {
  std::vector<std::string> tokens;
  std::optional<std::vector<BioTag>> tags;
  std::vector<std::uint8_t> categories;
  std::string domain_id;

  SpanSet gold_spans() const { return tags ? tags_to_spans(*tags) : SpanSet{}; }
};

struct DomainCorpus {
  std::string name;
  std::vector<std::string> category_set;
  std::vector<Sentence> sentences;
  bool has_token_labels = false;

  std::size_t size() const { return sentences.size(); }

  // Weakly-supervised view: same sentences, token labels dropped.
  DomainCorpus without_tags() const;
};

// Corpus file: first line `#categories<TAB>name1,name2,...`; then one record
// per line `tokens<TAB>tags<TAB>categories` with space-separated tokens and
// tags (or `-` when unlabeled) and comma-separated category names (or `-`).
DomainCorpus load_corpus(const std::string& path, const std::string& domain_name);

void save_corpus(const DomainCorpus& corpus, const std::string& path);

// Deterministic shuffle-split. |train| = round(train_fraction * N).
std::pair<DomainCorpus, DomainCorpus> split_corpus(const DomainCorpus& corpus,
                                                   double train_fraction,
                                                   std::uint64_t seed);

}  // namespace xaspect

#endif
