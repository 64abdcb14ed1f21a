#ifndef XASPECT_METRICS_HPP
#define XASPECT_METRICS_HPP

#include <vector>

#include "xaspect/bio.hpp"

namespace xaspect {

struct F1Report {
  long true_positives = 0;
  long predicted_count = 0;
  long gold_count = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Micro-averaged exact span match: a predicted (start,end) counts iff the
// gold set contains exactly that pair. Lists are aligned by sentence.
F1Report exact_match_f1(const std::vector<SpanSet>& predicted,
                        const std::vector<SpanSet>& gold);

struct SplitSummary {
  double mean = 0;
  double sd = 0;  // sample standard deviation, 0 for a single report
};
SplitSummary aggregate_splits(const std::vector<F1Report>& reports);

struct TTestResult {
  double t = 0;
  double p = 1;
};
// Two-sided paired t-test on per-split scores. Zero-variance differences:
// all-zero -> (0, 1); nonzero constant -> (+-inf, 0).
TTestResult paired_t_test(const std::vector<double>& f1_a,
                          const std::vector<double>& f1_b);

}  // namespace xaspect

#endif
