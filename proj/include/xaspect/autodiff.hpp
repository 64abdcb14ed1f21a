#ifndef XASPECT_AUTODIFF_HPP
#define XASPECT_AUTODIFF_HPP

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

namespace xaspect {

using Mat = Eigen::MatrixXd;

// A named trainable tensor. Gradients accumulate across tape backward passes
// until zero_grad(); the optimizer reads value/grad pairs.
struct Parameter {
  std::string name;
  Mat value;
  Mat grad;
  bool trainable = true;

  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

namespace ad {

// Reverse-mode autodiff over a Wengert list of matrix operations, double
// precision throughout. One Tape is built per batch; backward() runs a
// single reverse sweep and flushes parameter gradients into Parameter::grad.
//
// All operations are deterministic: node evaluation order is creation order
// and the backward sweep is its exact reverse.
class Tape {
 public:
  using Id = int;

  Id constant(Mat v);
  // Node backed by a Parameter; repeated calls with the same parameter on
  // one tape return the same node, so its gradient accumulates in one place.
  Id param(Parameter& p);

  Id matmul(Id a, Id b);
  Id transpose(Id a);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id add_rowvec(Id a, Id row);        // broadcast 1 x c over rows
  Id add_colvec(Id a, Id col);        // broadcast r x 1 over cols
  Id hadamard(Id a, Id b);
  Id scale(Id a, double x);
  Id sigmoid(Id a);
  Id tanh(Id a);
  Id relu(Id a);
  Id softplus(Id a);
  Id softmax_rows(Id a);
  Id logsumexp_cols(Id a);            // r x c -> 1 x c, reduces over rows
  Id concat_rows(const std::vector<Id>& parts);
  Id concat_cols(const std::vector<Id>& parts);
  Id slice_rows(Id a, int r0, int nrows);
  Id slice_cols(Id a, int c0, int ncols);
  Id row(Id a, int r) { return slice_rows(a, r, 1); }
  Id sum_all(Id a);                   // -> 1 x 1
  Id colwise_sum(Id a);               // r x c -> 1 x c
  Id squared_norm(Id a);              // -> 1 x 1
  Id pick(Id a, int r, int c);        // -> 1 x 1
  // Inverted dropout; mask entries are 0 or 1/(1-p), precomputed by caller.
  Id dropout(Id a, Mat mask);
  Id gather_rows(Id a, std::vector<int> rows);

  const Mat& value(Id id) const { return val_[static_cast<std::size_t>(id)]; }
  // Gradient of the last backward root w.r.t. node `id` (empty if untouched).
  const Mat& grad(Id id) const { return grad_[static_cast<std::size_t>(id)]; }

  // Seeds d(root)/d(root) = 1 and sweeps the list in reverse. root must be
  // 1 x 1. Parameter gradients are accumulated, not overwritten.
  void backward(Id root);

  std::size_t size() const { return steps_.size(); }

 private:
  enum class Op {
    kConstant, kParam, kMatMul, kTranspose, kAdd, kSub, kAddRow, kAddCol,
    kHadamard, kScale, kSigmoid, kTanh, kRelu, kSoftplus, kSoftmaxRows,
    kLogSumExpCols, kConcatRows, kConcatCols, kSliceRows, kSliceCols,
    kSumAll, kColwiseSum, kSqNorm, kPick, kDropout, kGatherRows,
  };

  struct Step {
    Op op;
    int a = -1, b = -1;
    int i0 = 0, i1 = 0;
    double x = 0.0;
    Mat aux;
    std::vector<int> srcs;
    Parameter* parameter = nullptr;
  };

  Id push(Step step, Mat value);
  Mat& grad_ref(Id id);

  std::vector<Step> steps_;
  std::vector<Mat> val_;
  std::vector<Mat> grad_;
  std::unordered_map<const Parameter*, Id> param_nodes_;
};

}  // namespace ad
}  // namespace xaspect

#endif
