#ifndef XASPECT_BIO_HPP
#define XASPECT_BIO_HPP

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace xaspect {

// Token-level labels: begin-aspect, inside-aspect, not-aspect. The numeric
// order BA < IA < N is load-bearing: it is the deterministic tie-break used
// by Viterbi decoding.
enum class BioTag : int { BA = 0, IA = 1, N = 2 };

constexpr int kNumTags = 3;

std::string to_string(BioTag t);
BioTag bio_tag_from_string(const std::string& s);  // throws ParseError

// Aspect spans as inclusive (start, end) token index pairs. Canonical form
// for exact-match scoring; spans in one set never overlap.
using Span = std::pair<int, int>;
using SpanSet = std::set<Span>;

// Decode a tag sequence into spans. Lenient: an IA that illegally opens a
// run (position 0 or right after N) starts a new span, so model output is
// always scoreable.
SpanSet tags_to_spans(const std::vector<BioTag>& tags);

// Inverse of tags_to_spans on well-formed input. Throws ValidationError on
// out-of-range or overlapping spans.
std::vector<BioTag> spans_to_tags(const SpanSet& spans, std::size_t length);

}  // namespace xaspect

#endif
