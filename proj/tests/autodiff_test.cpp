#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "xaspect/autodiff.hpp"
#include "xaspect/rng.hpp"

using namespace xaspect;
using testutil::check_gradients;

namespace {

Mat random_mat(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

Parameter make_param(const std::string& name, int r, int c, Rng& rng,
                     double lo = -1.0, double hi = 1.0) {
  Parameter p(name, r, c);
  p.value = random_mat(r, c, rng, lo, hi);
  return p;
}

// Relative-error bound for central finite differences at h = 1e-5.
constexpr double kGradTol = 1e-6;

}  // namespace

TEST_CASE("forward values of elementwise and matrix ops") {
  ad::Tape t;
  Mat a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  const auto ia = t.constant(a), ib = t.constant(b);

  Mat mm(2, 2);
  mm << 19, 22, 43, 50;
  CHECK(t.value(t.matmul(ia, ib)).isApprox(mm));
  CHECK(t.value(t.transpose(ia)).isApprox(a.transpose().eval()));
  CHECK(t.value(t.add(ia, ib)).isApprox((a + b).eval()));
  CHECK(t.value(t.sub(ia, ib)).isApprox((a - b).eval()));
  CHECK(t.value(t.hadamard(ia, ib)).isApprox(a.cwiseProduct(b).eval()));
  CHECK(t.value(t.scale(ia, -2.0)).isApprox((-2.0 * a).eval()));
  CHECK(t.value(t.sum_all(ia))(0, 0) == 10.0);
  CHECK(t.value(t.squared_norm(ia))(0, 0) == 30.0);
  CHECK(t.value(t.pick(ia, 1, 0))(0, 0) == 3.0);

  const auto row = t.constant((Mat(1, 2) << 10, 20).finished());
  Mat ar(2, 2);
  ar << 11, 22, 13, 24;
  CHECK(t.value(t.add_rowvec(ia, row)).isApprox(ar));
  const auto col = t.constant((Mat(2, 1) << 10, 20).finished());
  Mat ac(2, 2);
  ac << 11, 12, 23, 24;
  CHECK(t.value(t.add_colvec(ia, col)).isApprox(ac));

  CHECK(t.value(t.colwise_sum(ia)).isApprox((Mat(1, 2) << 4, 6).finished()));
  CHECK(t.value(t.sigmoid(t.constant(Mat::Zero(1, 1))))(0, 0) == 0.5);
  CHECK(t.value(t.tanh(t.constant(Mat::Zero(1, 1))))(0, 0) == 0.0);
  CHECK(t.value(t.relu(t.constant((Mat(1, 2) << -3, 4).finished())))
            .isApprox((Mat(1, 2) << 0, 4).finished()));
  CHECK(t.value(t.softplus(t.constant(Mat::Zero(1, 1))))(0, 0) ==
        doctest::Approx(std::log(2.0)));
}

TEST_CASE("softplus is stable at extreme inputs") {
  ad::Tape t;
  const auto v = t.value(t.softplus(t.constant((Mat(1, 3) << 800.0, -800.0, 0.0).finished())));
  CHECK(v(0, 0) == doctest::Approx(800.0));
  CHECK(v(0, 1) == 0.0);
  CHECK(std::isfinite(v(0, 0)));
}

TEST_CASE("softmax rows and logsumexp cols match hand values") {
  ad::Tape t;
  Mat a(2, 2);
  a << 0.0, std::log(3.0), 1000.0, 1000.0;
  const auto sm = t.value(t.softmax_rows(t.constant(a)));
  CHECK(sm(0, 0) == doctest::Approx(0.25));
  CHECK(sm(0, 1) == doctest::Approx(0.75));
  // Overflow-safe on large logits.
  CHECK(sm(1, 0) == doctest::Approx(0.5));
  CHECK(sm(1, 1) == doctest::Approx(0.5));

  Mat b(3, 2);
  b << 0, 1000, 0, 1000, 0, 1000;
  const auto lse = t.value(t.logsumexp_cols(t.constant(b)));
  CHECK(lse.rows() == 1);
  CHECK(lse(0, 0) == doctest::Approx(std::log(3.0)));
  CHECK(lse(0, 1) == doctest::Approx(1000.0 + std::log(3.0)));
}

TEST_CASE("concat, slice and gather act on the right blocks") {
  ad::Tape t;
  Mat a(1, 2), b(2, 2);
  a << 1, 2;
  b << 3, 4, 5, 6;
  const auto cr = t.concat_rows({t.constant(a), t.constant(b)});
  CHECK(t.value(cr).rows() == 3);
  CHECK(t.value(cr)(2, 1) == 6.0);
  CHECK(t.value(t.slice_rows(cr, 1, 2)).isApprox(b));
  CHECK(t.value(t.row(cr, 0)).isApprox(a));

  Mat c(2, 1);
  c << 7, 8;
  const auto cc = t.concat_cols({t.constant(b), t.constant(c)});
  CHECK(t.value(cc).cols() == 3);
  CHECK(t.value(t.slice_cols(cc, 2, 1)).isApprox(c));

  const auto g = t.gather_rows(cr, {2, 0, 0});
  CHECK(t.value(g).rows() == 3);
  CHECK(t.value(g)(0, 0) == 5.0);
  CHECK(t.value(g).row(1).isApprox(a));
  CHECK(t.value(g).row(2).isApprox(a));
}

TEST_CASE("dropout applies the given mask verbatim") {
  ad::Tape t;
  Mat a(2, 2), mask(2, 2);
  a << 1, 2, 3, 4;
  mask << 2, 0, 0, 2;  // p = 0.5 inverted dropout
  const auto d = t.value(t.dropout(t.constant(a), mask));
  CHECK(d(0, 0) == 2.0);
  CHECK(d(0, 1) == 0.0);
  CHECK(d(1, 1) == 8.0);
}

TEST_CASE("backward requires a scalar root") {
  ad::Tape t;
  const auto a = t.constant(Mat::Zero(2, 2));
  CHECK_THROWS_AS(t.backward(a), std::logic_error);
}

TEST_CASE("gradients match central differences for every op") {
  Rng rng(7);

  SUBCASE("matmul chain with transpose") {
    auto A = make_param("A", 3, 4, rng);
    auto B = make_param("B", 4, 2, rng);
    auto r = check_gradients({&A, &B}, [&](ad::Tape& t) {
      return t.squared_norm(t.matmul(t.param(A), t.param(B)));
    });
    CHECK(r.max_rel_err < kGradTol);
    r = check_gradients({&A}, [&](ad::Tape& t) {
      return t.sum_all(t.matmul(t.transpose(t.param(A)), t.param(A)));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("add sub hadamard scale") {
    auto A = make_param("A", 2, 3, rng);
    auto B = make_param("B", 2, 3, rng);
    const auto r = check_gradients({&A, &B}, [&](ad::Tape& t) {
      const auto s = t.sub(t.hadamard(t.param(A), t.param(B)),
                           t.scale(t.add(t.param(A), t.param(B)), 0.7));
      return t.squared_norm(s);
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("row and column broadcasts") {
    auto A = make_param("A", 3, 4, rng);
    auto row = make_param("row", 1, 4, rng);
    auto col = make_param("col", 3, 1, rng);
    const auto r = check_gradients({&A, &row, &col}, [&](ad::Tape& t) {
      return t.squared_norm(
          t.add_colvec(t.add_rowvec(t.param(A), t.param(row)), t.param(col)));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("sigmoid tanh softplus") {
    auto A = make_param("A", 2, 5, rng, -2.0, 2.0);
    const auto r = check_gradients({&A}, [&](ad::Tape& t) {
      const auto h = t.hadamard(t.sigmoid(t.param(A)), t.tanh(t.param(A)));
      return t.sum_all(t.add(h, t.softplus(t.param(A))));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("relu away from the kink") {
    auto A = make_param("A", 3, 3, rng);
    // Keep entries off zero so the subgradient is exact.
    for (int i = 0; i < 9; ++i)
      if (std::abs(A.value(i / 3, i % 3)) < 0.1) A.value(i / 3, i % 3) = 0.5;
    const auto r = check_gradients({&A}, [&](ad::Tape& t) {
      return t.squared_norm(t.relu(t.param(A)));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("softmax rows") {
    auto A = make_param("A", 3, 4, rng, -2.0, 2.0);
    auto W = make_param("W", 3, 4, rng);
    const auto r = check_gradients({&A, &W}, [&](ad::Tape& t) {
      return t.sum_all(t.hadamard(t.softmax_rows(t.param(A)), t.param(W)));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("logsumexp cols") {
    auto A = make_param("A", 4, 3, rng, -2.0, 2.0);
    auto W = make_param("W", 1, 3, rng);
    const auto r = check_gradients({&A, &W}, [&](ad::Tape& t) {
      return t.sum_all(t.hadamard(t.logsumexp_cols(t.param(A)), t.param(W)));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("concat and slice route gradients to the right blocks") {
    auto A = make_param("A", 2, 3, rng);
    auto B = make_param("B", 1, 3, rng);
    auto C = make_param("C", 3, 2, rng);
    const auto r = check_gradients({&A, &B, &C}, [&](ad::Tape& t) {
      const auto rows = t.concat_rows({t.param(A), t.param(B)});
      const auto cols = t.concat_cols({rows, t.param(C)});
      const auto sl = t.slice_cols(t.slice_rows(cols, 1, 2), 1, 3);
      return t.squared_norm(sl);
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("sum colwise_sum pick") {
    auto A = make_param("A", 3, 3, rng);
    const auto r = check_gradients({&A}, [&](ad::Tape& t) {
      const auto s = t.add(t.sum_all(t.param(A)),
                           t.pick(t.param(A), 2, 1));
      return t.add(s, t.squared_norm(t.colwise_sum(t.param(A))));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("dropout with fixed mask") {
    auto A = make_param("A", 2, 4, rng);
    Mat mask(2, 4);
    mask << 2, 0, 2, 0, 0, 2, 0, 2;
    const auto r = check_gradients({&A}, [&](ad::Tape& t) {
      return t.squared_norm(t.dropout(t.param(A), mask));
    });
    CHECK(r.max_rel_err < kGradTol);
  }

  SUBCASE("gather_rows accumulates over repeated rows") {
    auto A = make_param("A", 3, 2, rng);
    const auto r = check_gradients({&A}, [&](ad::Tape& t) {
      return t.squared_norm(t.gather_rows(t.param(A), {0, 2, 0, 0}));
    });
    CHECK(r.max_rel_err < kGradTol);
  }
}

TEST_CASE("the same parameter used twice shares one node") {
  Parameter W("W", 2, 2);
  W.value << 1, 2, 3, 4;
  ad::Tape t;
  const auto a = t.param(W);
  const auto b = t.param(W);
  CHECK(a == b);
  // d/dW sum(W + W) = 2 * ones
  t.backward(t.sum_all(t.add(a, b)));
  CHECK(W.grad.isApprox(Mat::Constant(2, 2, 2.0)));
}

TEST_CASE("parameter gradients accumulate across backward passes") {
  Parameter W("W", 1, 2);
  W.value << 3, -1;
  {
    ad::Tape t;
    t.backward(t.sum_all(t.param(W)));
  }
  {
    ad::Tape t;
    t.backward(t.sum_all(t.scale(t.param(W), 2.0)));
  }
  CHECK(W.grad.isApprox(Mat::Constant(1, 2, 3.0)));
  W.zero_grad();
  CHECK(W.grad.isZero());
}

TEST_CASE("non-trainable parameters receive no gradient") {
  Parameter W("W", 1, 2);
  W.value << 1, 1;
  W.trainable = false;
  ad::Tape t;
  t.backward(t.sum_all(t.param(W)));
  CHECK(W.grad.isZero());
}

TEST_CASE("nodes off the path to the root keep empty gradients") {
  ad::Tape t;
  const auto a = t.constant(Mat::Ones(2, 2));
  const auto unused = t.scale(a, 5.0);
  const auto root = t.sum_all(a);
  t.backward(root);
  CHECK(t.grad(unused).size() == 0);
  CHECK(t.grad(a).isApprox(Mat::Ones(2, 2)));
}
