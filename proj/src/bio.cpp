#include "xaspect/bio.hpp"

#include "xaspect/errors.hpp"

namespace xaspect {

std::string to_string(BioTag t) {
  switch (t) {
    case BioTag::BA: return "BA";
    case BioTag::IA: return "IA";
    case BioTag::N: return "N";
  }
  return "?";
}

BioTag bio_tag_from_string(const std::string& s) {
  if (s == "BA") return BioTag::BA;
  if (s == "IA") return BioTag::IA;
  if (s == "N") return BioTag::N;
  throw ParseError("unknown tag '" + s + "' (expected BA, IA or N)");
}

SpanSet tags_to_spans(const std::vector<BioTag>& tags) {
  SpanSet spans;
  int open = -1;  // start of the span currently being built
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    switch (tags[i]) {
      case BioTag::BA:
        if (open >= 0) spans.insert({open, i - 1});
        open = i;
        break;
      case BioTag::IA:
        // Continues the open span; an orphaned IA opens a new one.
        if (open < 0) open = i;
        break;
      case BioTag::N:
        if (open >= 0) spans.insert({open, i - 1});
        open = -1;
        break;
    }
  }
  if (open >= 0) spans.insert({open, static_cast<int>(tags.size()) - 1});
  return spans;
}

std::vector<BioTag> spans_to_tags(const SpanSet& spans, std::size_t length) {
  std::vector<BioTag> tags(length, BioTag::N);
  int prev_end = -1;  // spans are ordered by start in a std::set
  for (const auto& [start, end] : spans) {
    if (start < 0 || end >= static_cast<int>(length) || start > end)
      throw ValidationError("span (" + std::to_string(start) + "," + std::to_string(end) +
                            ") out of range for length " + std::to_string(length));
    if (start <= prev_end)
      throw ValidationError("overlapping spans at token " + std::to_string(start));
    prev_end = end;
    tags[start] = BioTag::BA;
    for (int i = start + 1; i <= end; ++i) tags[i] = BioTag::IA;
  }
  return tags;
}

}  // namespace xaspect
