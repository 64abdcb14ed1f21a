#include "xaspect/synth.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "xaspect/errors.hpp"
#include "xaspect/rng.hpp"

namespace xaspect {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSynthStream = 4;

}  // namespace

void SynthSpec::validate() const {
  if (domain.empty()) throw ValidationError("synth spec needs a domain name");
  if (function_words.size() < 3)
    throw ValidationError("synth spec needs a determiner and two copulas");
  if (filler.empty()) throw ValidationError("synth spec needs filler words");
  if (categories.empty()) throw ValidationError("synth spec needs categories");

  std::set<std::string> reserved(function_words.begin(), function_words.end());
  for (const std::string& f : filler)
    if (!reserved.insert(f).second)
      throw ValidationError("filler word collides with another word: " + f);

  std::set<std::string> term_tokens;
  for (const CategorySpec& c : categories) {
    if (c.name.empty()) throw ValidationError("category without a name");
    if (c.terms.empty())
      throw ValidationError("category " + c.name + " has an empty lexicon");
    for (const auto& term : c.terms) {
      if (term.empty()) throw ValidationError("empty aspect term in " + c.name);
      for (const std::string& tok : term) {
        if (reserved.count(tok))
          throw ValidationError("aspect token collides with filler/function word: " + tok);
        if (!term_tokens.insert(tok).second)
          throw ValidationError("aspect lexicons overlap on token: " + tok);
      }
    }
  }

  if (!opinions.empty() && opinions.size() < categories.size())
    throw ValidationError("synth spec needs at least one opinion word per category");
  for (const std::string& o : opinions) {
    if (term_tokens.count(o))
      throw ValidationError("opinion word collides with an aspect token: " + o);
    if (!reserved.insert(o).second)
      throw ValidationError("opinion word collides with another word: " + o);
  }
}

DomainCorpus generate_synthetic(const SynthSpec& spec, std::size_t size,
                                std::uint64_t seed) {
  spec.validate();
  Rng rng(mix_seed(seed, kSynthStream));

  DomainCorpus corpus;
  corpus.name = spec.domain;
  for (const CategorySpec& c : spec.categories)
    corpus.category_set.push_back(c.name);
  corpus.has_token_labels = true;

  const std::string& the = spec.function_words[0];
  auto copula = [&]() -> const std::string& {
    return spec.function_words[1 + rng.below(2)];
  };
  auto any_filler = [&]() -> const std::string& {
    return spec.filler[rng.below(spec.filler.size())];
  };
  auto loose_word = [&]() -> const std::string& {
    return rng.bernoulli(0.5)
               ? any_filler()
               : spec.function_words[rng.below(spec.function_words.size())];
  };

  for (std::size_t si = 0; si < size; ++si) {
    Sentence s;
    s.domain_id = spec.domain;
    s.categories.assign(spec.categories.size(), 0);
    std::vector<BioTag> tags;

    auto push = [&](const std::string& tok, BioTag tag) {
      s.tokens.push_back(tok);
      tags.push_back(tag);
    };

    const std::size_t frames = 2 + rng.below(2);
    for (std::size_t f = 0; f < frames; ++f) {
      if (f > 0 && rng.bernoulli(0.5)) push(loose_word(), BioTag::N);
      push(the, BioTag::N);
      if (rng.bernoulli(0.55)) {
        const std::size_t ci = rng.below(spec.categories.size());
        const CategorySpec& cat = spec.categories[ci];
        const auto& term = cat.terms[rng.below(cat.terms.size())];
        for (std::size_t k = 0; k < term.size(); ++k)
          push(term[k], k == 0 ? BioTag::BA : BioTag::IA);
        s.categories[ci] = 1;
      } else {
        push(any_filler(), BioTag::N);
      }
      push(copula(), BioTag::N);
      push(any_filler(), BioTag::N);
    }

    // Opinion tail: one leaning opinion word per occurring category, so the
    // shared opinion vocabulary carries the category mix of the sentence.
    if (!spec.opinions.empty()) {
      const std::size_t nc = spec.categories.size();
      bool any = false;
      for (std::size_t ci = 0; ci < nc; ++ci) {
        if (!s.categories[ci]) continue;
        any = true;
        if (!rng.bernoulli(0.85)) continue;
        const std::size_t leaning = (spec.opinions.size() - ci - 1) / nc + 1;
        push(spec.opinions[ci + nc * rng.below(leaning)], BioTag::N);
      }
      if (!any && rng.bernoulli(0.7))
        push(spec.opinions[rng.below(spec.opinions.size())], BioTag::N);
    }

    s.tags = std::move(tags);
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

std::string SynthSpec::to_json() const {
  json cats = json::array();
  for (const CategorySpec& c : categories)
    cats.push_back({{"name", c.name}, {"terms", c.terms}});
  json j{{"domain", domain},
         {"function_words", function_words},
         {"filler", filler},
         {"categories", cats},
         {"opinions", opinions}};
  return j.dump(2);
}

SynthSpec SynthSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("synth spec is not valid JSON: ") + e.what());
  }
  SynthSpec s;
  try {
    s.domain = j.at("domain").get<std::string>();
    s.function_words = j.at("function_words").get<std::vector<std::string>>();
    s.filler = j.at("filler").get<std::vector<std::string>>();
    for (const json& c : j.at("categories")) {
      CategorySpec cat;
      cat.name = c.at("name").get<std::string>();
      cat.terms = c.at("terms").get<std::vector<std::vector<std::string>>>();
      s.categories.push_back(std::move(cat));
    }
    s.opinions = j.value("opinions", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

SynthSpec SynthSpec::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open synth spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void SynthSpec::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write synth spec: " + path);
  out << to_json() << "\n";
}

std::pair<SynthSpec, SynthSpec> make_paired_specs(std::uint64_t seed) {
  Rng rng(mix_seed(seed, kSynthStream + 1));
  static const char* syllables[] = {
      "ba", "be", "bo", "da", "de", "do", "ka", "ke", "ko", "la",
      "le", "lo", "ma", "me", "mo", "na", "ne", "no", "ra", "re",
      "ro", "sa", "se", "so", "ta", "te", "to", "za", "ze", "zo",
  };
  const std::vector<std::string> function_words = {"the", "is",  "was", "a",
                                                   "and", "very", "but", "so"};
  std::set<std::string> used(function_words.begin(), function_words.end());
  auto word = [&]() {
    for (;;) {
      std::string w;
      const std::size_t len = 2 + rng.below(2);
      for (std::size_t i = 0; i < len; ++i)
        w += syllables[rng.below(std::size(syllables))];
      if (used.insert(w).second) return w;
    }
  };

  // Opinions are drawn once and shared by both domains, like function words.
  std::vector<std::string> opinions;
  for (int i = 0; i < 12; ++i) opinions.push_back(word());

  auto make = [&](const std::string& name) {
    SynthSpec s;
    s.domain = name;
    s.function_words = function_words;
    s.opinions = opinions;
    for (int i = 0; i < 24; ++i) s.filler.push_back(word());
    for (int c = 0; c < 4; ++c) {
      CategorySpec cat;
      cat.name = "cat" + std::string(1, static_cast<char>('A' + c));
      for (int i = 0; i < 5; ++i) cat.terms.push_back({word()});
      for (int i = 0; i < 2; ++i) cat.terms.push_back({word(), word()});
      s.categories.push_back(std::move(cat));
    }
    return s;
  };
  SynthSpec a = make("src");
  SynthSpec b = make("tgt");
  return {std::move(a), std::move(b)};
}

}  // namespace xaspect
