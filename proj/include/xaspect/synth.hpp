#ifndef XASPECT_SYNTH_HPP
#define XASPECT_SYNTH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xaspect/corpus.hpp"

namespace xaspect {

struct CategorySpec {
  std::string name;
  std::vector<std::vector<std::string>> terms;  // each term is 1+ tokens
};

// Generative recipe for one synthetic domain. Sentences are built from
// "the X is/was <filler>" frames where X is either an aspect term (tagged and
// category-marked) or a plain filler noun, so surface context alone cannot
// separate aspects from non-aspects — only lexical identity and the sentence
// categories can. When `opinions` is non-empty, each sentence additionally
// ends with opinion words drawn per occurring category (opinion j leans
// toward category j % |categories|), giving paired domains a shared,
// category-conditioned vocabulary: like the function words, opinions may be
// shared across a pair while aspect lexicons and fillers must stay disjoint.
struct SynthSpec {
  std::string domain;
  std::vector<std::string> function_words;  // [0]=determiner, [1..2]=copulas
  std::vector<std::string> filler;
  std::vector<CategorySpec> categories;
  std::vector<std::string> opinions;  // optional; empty disables the tail

  void validate() const;
  std::string to_json() const;
  static SynthSpec from_json(const std::string& text);
  static SynthSpec load_file(const std::string& path);
  void save_file(const std::string& path) const;
};

DomainCorpus generate_synthetic(const SynthSpec& spec, std::size_t size,
                                std::uint64_t seed);

// Two domains with identical generative structure (same category count, term
// counts, frame grammar, shared function words, shared opinion vocabulary)
// over fully disjoint aspect and filler vocabularies of pseudo-words.
std::pair<SynthSpec, SynthSpec> make_paired_specs(std::uint64_t seed);

}  // namespace xaspect

#endif
