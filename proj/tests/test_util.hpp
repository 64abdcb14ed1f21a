#ifndef XASPECT_TESTS_TEST_UTIL_HPP
#define XASPECT_TESTS_TEST_UTIL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "xaspect/autodiff.hpp"
#include "xaspect/bio.hpp"

namespace xaspect::testutil {

// True iff `f()` throws exactly an E whose message contains `needle`.
template <class E, class F>
bool throws_containing(F&& f, const std::string& needle) {
  try {
    f();
  } catch (const E& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  } catch (...) {
    return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Brute-force linear-chain CRF oracle. Enumerates all kNumTags^n sequences,
// so only usable for n <= ~8. Scores must match the tape implementation
// exactly (same additions in the same order is not required; values agree to
// fp tolerance).

inline double brute_score(const Eigen::MatrixXd& emissions,
                          const Eigen::MatrixXd& trans,
                          const Eigen::MatrixXd& start,
                          const Eigen::MatrixXd& stop,
                          const std::vector<int>& tags) {
  const std::size_t n = tags.size();
  double s = start(0, tags[0]) + emissions(0, tags[0]);
  for (std::size_t i = 1; i < n; ++i) {
    s += trans(tags[i - 1], tags[i]) + emissions(static_cast<int>(i), tags[i]);
  }
  s += stop(0, tags[n - 1]);
  return s;
}

inline std::vector<std::vector<int>> all_tag_sequences(std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = n;
    while (i > 0 && cur[i - 1] == kNumTags - 1) cur[--i] = 0;
    if (i == 0) break;
    ++cur[i - 1];
  }
  return out;
}

inline double brute_log_partition(const Eigen::MatrixXd& emissions,
                                  const Eigen::MatrixXd& trans,
                                  const Eigen::MatrixXd& start,
                                  const Eigen::MatrixXd& stop) {
  const auto seqs = all_tag_sequences(static_cast<std::size_t>(emissions.rows()));
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> scores;
  scores.reserve(seqs.size());
  for (const auto& seq : seqs) {
    double s = brute_score(emissions, trans, start, stop, seq);
    scores.push_back(s);
    if (s > best) best = s;
  }
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - best);
  return best + std::log(acc);
}

// First sequence in enumeration order achieving the max score, with a strict
// ">" comparison. With continuous random parameters the argmax is unique, so
// this matches Viterbi regardless of either side's tie-break convention.
inline std::vector<int> brute_best_sequence(const Eigen::MatrixXd& emissions,
                                            const Eigen::MatrixXd& trans,
                                            const Eigen::MatrixXd& start,
                                            const Eigen::MatrixXd& stop) {
  const auto seqs = all_tag_sequences(static_cast<std::size_t>(emissions.rows()));
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  for (const auto& seq : seqs) {
    double s = brute_score(emissions, trans, start, stop, seq);
    if (s > best) {
      best = s;
      arg = seq;
    }
  }
  return arg;
}

// ---------------------------------------------------------------------------
// Central-difference gradient checker. `build` must construct the loss from
// scratch on the given tape (1x1 root) using the current parameter values;
// any stochastic inputs (dropout masks) must be fixed by the caller.

struct GradCheckResult {
  double max_rel_err = 0.0;   // |a-n| / max(1e-8, |a|, |n|), worst entry
  double max_abs_err = 0.0;
  std::size_t entries = 0;
};

inline GradCheckResult check_gradients(
    const std::vector<Parameter*>& params,
    const std::function<ad::Tape::Id(ad::Tape&)>& build) {
  for (Parameter* p : params) p->zero_grad();
  {
    ad::Tape tape;
    tape.backward(build(tape));
  }
  GradCheckResult res;
  for (Parameter* p : params) {
    for (int r = 0; r < p->value.rows(); ++r) {
      for (int c = 0; c < p->value.cols(); ++c) {
        const double x0 = p->value(r, c);
        const double h = 1e-5 * std::max(1.0, std::abs(x0));
        p->value(r, c) = x0 + h;
        double f_plus;
        {
          ad::Tape tape;
          f_plus = tape.value(build(tape))(0, 0);
        }
        p->value(r, c) = x0 - h;
        double f_minus;
        {
          ad::Tape tape;
          f_minus = tape.value(build(tape))(0, 0);
        }
        p->value(r, c) = x0;
        const double numeric = (f_plus - f_minus) / (2.0 * h);
        const double analytic = p->grad(r, c);
        const double abs_err = std::abs(analytic - numeric);
        const double rel_err =
            abs_err / std::max({1e-8, std::abs(analytic), std::abs(numeric)});
        res.max_abs_err = std::max(res.max_abs_err, abs_err);
        res.max_rel_err = std::max(res.max_rel_err, rel_err);
        ++res.entries;
      }
    }
  }
  return res;
}

// Same check restricted to a sample of entries; used where exhaustive
// probing would be slow. Probes are (param, row, col) picks from `picks`.
struct Probe {
  Parameter* param;
  int row;
  int col;
};

inline GradCheckResult check_gradients_at(
    const std::vector<Probe>& probes,
    const std::vector<Parameter*>& params,
    const std::function<ad::Tape::Id(ad::Tape&)>& build) {
  for (Parameter* p : params) p->zero_grad();
  {
    ad::Tape tape;
    tape.backward(build(tape));
  }
  GradCheckResult res;
  for (const Probe& pr : probes) {
    Parameter* p = pr.param;
    const double x0 = p->value(pr.row, pr.col);
    const double h = 1e-5 * std::max(1.0, std::abs(x0));
    p->value(pr.row, pr.col) = x0 + h;
    double f_plus;
    {
      ad::Tape tape;
      f_plus = tape.value(build(tape))(0, 0);
    }
    p->value(pr.row, pr.col) = x0 - h;
    double f_minus;
    {
      ad::Tape tape;
      f_minus = tape.value(build(tape))(0, 0);
    }
    p->value(pr.row, pr.col) = x0;
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    const double analytic = p->grad(pr.row, pr.col);
    const double abs_err = std::abs(analytic - numeric);
    const double rel_err =
        abs_err / std::max({1e-8, std::abs(analytic), std::abs(numeric)});
    res.max_abs_err = std::max(res.max_abs_err, abs_err);
    res.max_rel_err = std::max(res.max_rel_err, rel_err);
    ++res.entries;
  }
  return res;
}

}  // namespace xaspect::testutil

#endif
