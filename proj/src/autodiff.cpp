#include "xaspect/autodiff.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace xaspect {
namespace ad {

namespace {

Mat row_softmax(const Mat& x) {
  Mat y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    Eigen::RowVectorXd e = (x.row(r).array() - m).exp();
    y.row(r) = e / e.sum();
  }
  return y;
}

}  // namespace

Tape::Id Tape::push(Step step, Mat value) {
  steps_.push_back(std::move(step));
  val_.push_back(std::move(value));
  grad_.emplace_back();
  return static_cast<Id>(steps_.size()) - 1;
}

Mat& Tape::grad_ref(Id id) {
  Mat& g = grad_[static_cast<std::size_t>(id)];
  if (g.size() == 0) g = Mat::Zero(val_[static_cast<std::size_t>(id)].rows(), val_[static_cast<std::size_t>(id)].cols());
  return g;
}

Tape::Id Tape::constant(Mat v) { return push({.op = Op::kConstant}, std::move(v)); }

Tape::Id Tape::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return it->second;
  Id id = push({.op = Op::kParam, .parameter = &p}, p.value);
  param_nodes_.emplace(&p, id);
  return id;
}

Tape::Id Tape::matmul(Id a, Id b) {
  assert(value(a).cols() == value(b).rows());
  return push({.op = Op::kMatMul, .a = a, .b = b}, value(a) * value(b));
}

Tape::Id Tape::transpose(Id a) {
  return push({.op = Op::kTranspose, .a = a}, value(a).transpose());
}

Tape::Id Tape::add(Id a, Id b) {
  assert(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols());
  return push({.op = Op::kAdd, .a = a, .b = b}, value(a) + value(b));
}

Tape::Id Tape::sub(Id a, Id b) {
  assert(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols());
  return push({.op = Op::kSub, .a = a, .b = b}, value(a) - value(b));
}

Tape::Id Tape::add_rowvec(Id a, Id row) {
  assert(value(row).rows() == 1 && value(row).cols() == value(a).cols());
  Mat v = value(a);
  v.rowwise() += Eigen::RowVectorXd(value(row));
  return push({.op = Op::kAddRow, .a = a, .b = row}, std::move(v));
}

Tape::Id Tape::add_colvec(Id a, Id col) {
  assert(value(col).cols() == 1 && value(col).rows() == value(a).rows());
  Mat v = value(a);
  v.colwise() += Eigen::VectorXd(value(col));
  return push({.op = Op::kAddCol, .a = a, .b = col}, std::move(v));
}

Tape::Id Tape::hadamard(Id a, Id b) {
  assert(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols());
  return push({.op = Op::kHadamard, .a = a, .b = b}, value(a).cwiseProduct(value(b)));
}

Tape::Id Tape::scale(Id a, double x) {
  return push({.op = Op::kScale, .a = a, .x = x}, value(a) * x);
}

Tape::Id Tape::sigmoid(Id a) {
  Mat v = (1.0 + (-value(a).array()).exp()).inverse();
  return push({.op = Op::kSigmoid, .a = a}, std::move(v));
}

Tape::Id Tape::tanh(Id a) {
  Mat v = value(a).array().tanh();
  return push({.op = Op::kTanh, .a = a}, std::move(v));
}

Tape::Id Tape::relu(Id a) {
  Mat v = value(a).cwiseMax(0.0);
  return push({.op = Op::kRelu, .a = a}, std::move(v));
}

Tape::Id Tape::softplus(Id a) {
  // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|}), stable for large |x|.
  Mat v = value(a).unaryExpr([](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  });
  return push({.op = Op::kSoftplus, .a = a}, std::move(v));
}

Tape::Id Tape::softmax_rows(Id a) {
  return push({.op = Op::kSoftmaxRows, .a = a}, row_softmax(value(a)));
}

Tape::Id Tape::logsumexp_cols(Id a) {
  const Mat& x = value(a);
  Mat v(1, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double m = x.col(c).maxCoeff();
    v(0, c) = m + std::log((x.col(c).array() - m).exp().sum());
  }
  return push({.op = Op::kLogSumExpCols, .a = a}, std::move(v));
}

Tape::Id Tape::concat_rows(const std::vector<Id>& parts) {
  assert(!parts.empty());
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts.front()).cols();
  for (Id p : parts) rows += value(p).rows();
  Mat v(rows, cols);
  Eigen::Index r = 0;
  for (Id p : parts) {
    v.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  return push({.op = Op::kConcatRows, .srcs = parts}, std::move(v));
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
  assert(!parts.empty());
  Eigen::Index cols = 0;
  const Eigen::Index rows = value(parts.front()).rows();
  for (Id p : parts) cols += value(p).cols();
  Mat v(rows, cols);
  Eigen::Index c = 0;
  for (Id p : parts) {
    v.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  return push({.op = Op::kConcatCols, .srcs = parts}, std::move(v));
}

Tape::Id Tape::slice_rows(Id a, int r0, int nrows) {
  assert(r0 >= 0 && r0 + nrows <= value(a).rows());
  return push({.op = Op::kSliceRows, .a = a, .i0 = r0, .i1 = nrows},
              value(a).middleRows(r0, nrows));
}

Tape::Id Tape::slice_cols(Id a, int c0, int ncols) {
  assert(c0 >= 0 && c0 + ncols <= value(a).cols());
  return push({.op = Op::kSliceCols, .a = a, .i0 = c0, .i1 = ncols},
              value(a).middleCols(c0, ncols));
}

Tape::Id Tape::sum_all(Id a) {
  Mat v(1, 1);
  v(0, 0) = value(a).sum();
  return push({.op = Op::kSumAll, .a = a}, std::move(v));
}

Tape::Id Tape::colwise_sum(Id a) {
  Mat v = value(a).colwise().sum();
  return push({.op = Op::kColwiseSum, .a = a}, std::move(v));
}

Tape::Id Tape::squared_norm(Id a) {
  Mat v(1, 1);
  v(0, 0) = value(a).squaredNorm();
  return push({.op = Op::kSqNorm, .a = a}, std::move(v));
}

Tape::Id Tape::pick(Id a, int r, int c) {
  assert(r >= 0 && r < value(a).rows() && c >= 0 && c < value(a).cols());
  Mat v(1, 1);
  v(0, 0) = value(a)(r, c);
  return push({.op = Op::kPick, .a = a, .i0 = r, .i1 = c}, std::move(v));
}

Tape::Id Tape::dropout(Id a, Mat mask) {
  assert(mask.rows() == value(a).rows() && mask.cols() == value(a).cols());
  Mat v = value(a).cwiseProduct(mask);
  return push({.op = Op::kDropout, .a = a, .aux = std::move(mask)}, std::move(v));
}

Tape::Id Tape::gather_rows(Id a, std::vector<int> rows) {
  Mat v(static_cast<Eigen::Index>(rows.size()), value(a).cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    assert(rows[i] >= 0 && rows[i] < value(a).rows());
    v.row(static_cast<Eigen::Index>(i)) = value(a).row(rows[i]);
  }
  Step s{.op = Op::kGatherRows, .a = a};
  s.srcs.assign(rows.begin(), rows.end());
  return push(std::move(s), std::move(v));
}

void Tape::backward(Id root) {
  if (value(root).rows() != 1 || value(root).cols() != 1)
    throw std::logic_error("backward root must be a 1x1 node");
  for (Mat& g : grad_) g.resize(0, 0);
  grad_ref(root)(0, 0) = 1.0;

  for (Id id = static_cast<Id>(steps_.size()) - 1; id >= 0; --id) {
    const Mat& g = grad_[static_cast<std::size_t>(id)];
    if (g.size() == 0) continue;
    const Step& s = steps_[static_cast<std::size_t>(id)];
    const Mat& v = val_[static_cast<std::size_t>(id)];

    switch (s.op) {
      case Op::kConstant:
        break;
      case Op::kParam:
        if (s.parameter->trainable) s.parameter->grad += g;
        break;
      case Op::kMatMul:
        grad_ref(s.a).noalias() += g * value(s.b).transpose();
        grad_ref(s.b).noalias() += value(s.a).transpose() * g;
        break;
      case Op::kTranspose:
        grad_ref(s.a) += g.transpose();
        break;
      case Op::kAdd:
        grad_ref(s.a) += g;
        grad_ref(s.b) += g;
        break;
      case Op::kSub:
        grad_ref(s.a) += g;
        grad_ref(s.b) -= g;
        break;
      case Op::kAddRow:
        grad_ref(s.a) += g;
        grad_ref(s.b) += g.colwise().sum();
        break;
      case Op::kAddCol:
        grad_ref(s.a) += g;
        grad_ref(s.b) += g.rowwise().sum();
        break;
      case Op::kHadamard:
        grad_ref(s.a) += g.cwiseProduct(value(s.b));
        grad_ref(s.b) += g.cwiseProduct(value(s.a));
        break;
      case Op::kScale:
        grad_ref(s.a) += g * s.x;
        break;
      case Op::kSigmoid:
        grad_ref(s.a).array() += g.array() * v.array() * (1.0 - v.array());
        break;
      case Op::kTanh:
        grad_ref(s.a).array() += g.array() * (1.0 - v.array().square());
        break;
      case Op::kRelu:
        // subgradient 0 at the kink
        grad_ref(s.a).array() +=
            g.array() * (value(s.a).array() > 0.0).cast<double>();
        break;
      case Op::kSoftplus:
        grad_ref(s.a).array() +=
            g.array() * (1.0 + (-value(s.a).array()).exp()).inverse();
        break;
      case Op::kSoftmaxRows: {
        Mat& ga = grad_ref(s.a);
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
          const double dot = g.row(r).dot(v.row(r));
          ga.row(r).array() += (g.row(r).array() - dot) * v.row(r).array();
        }
        break;
      }
      case Op::kLogSumExpCols: {
        // d/dx_rc = softmax over the column = exp(x_rc - lse_c)
        const Mat& x = value(s.a);
        Mat& ga = grad_ref(s.a);
        for (Eigen::Index c = 0; c < x.cols(); ++c)
          ga.col(c).array() += g(0, c) * (x.col(c).array() - v(0, c)).exp();
        break;
      }
      case Op::kConcatRows: {
        Eigen::Index r = 0;
        for (Id p : s.srcs) {
          const Eigen::Index nr = value(p).rows();
          grad_ref(p) += g.middleRows(r, nr);
          r += nr;
        }
        break;
      }
      case Op::kConcatCols: {
        Eigen::Index c = 0;
        for (Id p : s.srcs) {
          const Eigen::Index nc = value(p).cols();
          grad_ref(p) += g.middleCols(c, nc);
          c += nc;
        }
        break;
      }
      case Op::kSliceRows:
        grad_ref(s.a).middleRows(s.i0, s.i1) += g;
        break;
      case Op::kSliceCols:
        grad_ref(s.a).middleCols(s.i0, s.i1) += g;
        break;
      case Op::kSumAll:
        grad_ref(s.a).array() += g(0, 0);
        break;
      case Op::kColwiseSum:
        grad_ref(s.a).rowwise() += Eigen::RowVectorXd(g);
        break;
      case Op::kSqNorm:
        grad_ref(s.a) += (2.0 * g(0, 0)) * value(s.a);
        break;
      case Op::kPick:
        grad_ref(s.a)(s.i0, s.i1) += g(0, 0);
        break;
      case Op::kDropout:
        grad_ref(s.a) += g.cwiseProduct(s.aux);
        break;
      case Op::kGatherRows: {
        Mat& ga = grad_ref(s.a);
        for (std::size_t i = 0; i < s.srcs.size(); ++i)
          ga.row(s.srcs[i]) += g.row(static_cast<Eigen::Index>(i));
        break;
      }
    }
  }
}

}  // namespace ad
}  // namespace xaspect
