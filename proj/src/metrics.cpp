#include "xaspect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "xaspect/errors.hpp"

namespace xaspect {

F1Report exact_match_f1(const std::vector<SpanSet>& predicted,
                        const std::vector<SpanSet>& gold) {
  if (predicted.size() != gold.size())
    throw ValidationError("predicted and gold lists must align by sentence");
  F1Report r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    r.predicted_count += static_cast<long>(predicted[i].size());
    r.gold_count += static_cast<long>(gold[i].size());
    for (const Span& s : predicted[i])
      r.true_positives += gold[i].count(s) ? 1 : 0;
  }
  r.precision = r.predicted_count == 0
                    ? 0.0
                    : static_cast<double>(r.true_positives) / r.predicted_count;
  r.recall = r.gold_count == 0
                 ? 0.0
                 : static_cast<double>(r.true_positives) / r.gold_count;
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

SplitSummary aggregate_splits(const std::vector<F1Report>& reports) {
  if (reports.empty())
    throw ValidationError("cannot aggregate zero reports");
  SplitSummary s;
  for (const F1Report& r : reports) s.mean += r.f1;
  s.mean /= static_cast<double>(reports.size());
  if (reports.size() > 1) {
    double sq = 0;
    for (const F1Report& r : reports) {
      const double d = r.f1 - s.mean;
      sq += d * d;
    }
    s.sd = std::sqrt(sq / static_cast<double>(reports.size() - 1));
  }
  return s;
}

TTestResult paired_t_test(const std::vector<double>& f1_a,
                          const std::vector<double>& f1_b) {
  if (f1_a.size() != f1_b.size())
    throw ValidationError("paired t-test needs equal-length score lists");
  const std::size_t n = f1_a.size();
  if (n < 2) throw ValidationError("paired t-test needs at least two pairs");

  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += f1_a[i] - f1_b[i];
  mean /= static_cast<double>(n);
  double sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (f1_a[i] - f1_b[i]) - mean;
    sq += d * d;
  }
  const double sd = std::sqrt(sq / static_cast<double>(n - 1));

  TTestResult r;
  if (sd == 0.0) {
    if (mean == 0.0) return {0.0, 1.0};
    r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

}  // namespace xaspect
