#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "finslerlab/expression.hpp"
#include "finslerlab/jets.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/parallel.hpp"
#include "finslerlab/sampling.hpp"
#include "finslerlab/taylor.hpp"
#include "finslerlab/tensor.hpp"
#include "models.hpp"

using namespace finslerlab;

namespace {

Taylor var(const TaylorSpace& s, int i, double v) { return Taylor::variable(s, i, v, s.max_order()); }

std::vector<int> e2(int a, int b) { return {a, b}; }

}  // namespace

// ---- Taylor algebra ----

TEST(Taylor, ProductAndQuotientDerivatives) {
  const auto& s = TaylorSpace::get(2, 5);
  const double x0 = 0.7, y0 = -0.4;
  Taylor x = var(s, 0, x0), y = var(s, 1, y0);
  Taylor f = x * x * y / (1.0 + x * y);
  // d/dy of x^2 y / (1 + x y) = x^2 / (1 + x y)^2
  const double d = 1.0 + x0 * y0;
  EXPECT_NEAR(f.partial(e2(0, 1)), x0 * x0 / (d * d), 1e-14);
  // d^2/dy^2 = -2 x^3 / (1 + x y)^3
  EXPECT_NEAR(f.partial(e2(0, 2)), -2.0 * x0 * x0 * x0 / (d * d * d), 1e-14);
}

TEST(Taylor, ElementaryFunctionsToFifthOrder) {
  const auto& s = TaylorSpace::get(1, 5);
  const double a = 0.3;
  Taylor x = var(s, 0, a);
  const std::vector<int> k5{5};
  EXPECT_NEAR(sin(x).partial(k5), std::cos(a), 1e-13);
  EXPECT_NEAR(cos(x).partial(k5), -std::sin(a), 1e-13);
  EXPECT_NEAR(exp(x).partial(k5), std::exp(a), 1e-13);
  EXPECT_NEAR(log(x).partial(k5), 24.0 / std::pow(a, 5), 1e-8);
  EXPECT_NEAR(sqrt(x).partial(std::vector<int>{3}), 3.0 / 8.0 * std::pow(a, -2.5), 1e-11);
  EXPECT_NEAR(pow(x, 1.5).partial(std::vector<int>{2}), 0.75 * std::pow(a, -0.5), 1e-13);
  EXPECT_NEAR(atan(x).partial(std::vector<int>{1}), 1.0 / (1 + a * a), 1e-14);
  EXPECT_NEAR(sinh(x).partial(std::vector<int>{4}), std::sinh(a), 1e-13);
  EXPECT_NEAR(cosh(x).partial(std::vector<int>{3}), std::sinh(a), 1e-13);
  EXPECT_NEAR(tan(x).partial(std::vector<int>{1}), 1.0 / (std::cos(a) * std::cos(a)), 1e-13);
  EXPECT_NEAR(pow(x, 3).partial(std::vector<int>{3}), 6.0, 1e-13);
}

TEST(Taylor, DerivativeLowersOrderAndExhaustionThrows) {
  const auto& s = TaylorSpace::get(2, 2);
  Taylor x = var(s, 0, 1.0);
  Taylor f = x * x;
  EXPECT_EQ(f.order(), 2);
  Taylor d = f.derivative(0).derivative(0);
  EXPECT_EQ(d.order(), 0);
  EXPECT_NEAR(d.value(), 2.0, 1e-15);
  Taylor dd = d.derivative(0);
  EXPECT_FALSE(dd.valid());
  EXPECT_THROW(dd.value(), Error);
}

TEST(Taylor, ConstantsMixWithExpansions) {
  const auto& s = TaylorSpace::get(1, 3);
  Taylor c(2.5);
  EXPECT_TRUE(c.is_constant());
  Taylor x = var(s, 0, 1.0);
  Taylor f = c * x + 1.0;
  EXPECT_NEAR(f.value(), 3.5, 1e-15);
  EXPECT_NEAR(f.partial(std::vector<int>{1}), 2.5, 1e-15);
}

// ---- expressions ----

TEST(Expression, ParsesAndEvaluates) {
  auto e = Expression::parse("1 + 0.5*x1^2 - sin(x2)/2", {"x1", "x2"});
  std::vector<double> v{2.0, 0.3};
  EXPECT_NEAR(e.eval(std::span<const double>(v)), 1 + 2.0 - std::sin(0.3) / 2, 1e-15);
  EXPECT_TRUE(e.depends_on(0));
  EXPECT_TRUE(e.depends_on(1));
  EXPECT_FALSE(Expression::parse("3*2", {"x1"}).depends_on(0));
  EXPECT_TRUE(Expression::parse("exp(0.1)", {"x1"}).is_constant());
}

TEST(Expression, RejectsMalformedInput) {
  EXPECT_THROW(Expression::parse("x3 + 1", {"x1", "x2"}), ConfigError);
  EXPECT_THROW(Expression::parse("1 +", {"x1"}), ConfigError);
  EXPECT_THROW(Expression::parse("foo(x1)", {"x1"}), ConfigError);
  EXPECT_THROW(Expression::parse("(x1", {"x1"}), ConfigError);
}

TEST(Expression, TaylorEvaluationMatchesDirectArithmetic) {
  const auto& s = TaylorSpace::get(1, 4);
  auto e = Expression::parse("exp(0.2*x1)*cos(x1)", {"x1"});
  std::vector<Taylor> v{var(s, 0, 0.4)};
  Taylor a = e.eval<Taylor>(std::span<const Taylor>(v));
  Taylor b = exp(0.2 * v[0]) * cos(v[0]);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(a.partial(std::vector<int>{k}), b.partial(std::vector<int>{k}), 1e-13);
}

// ---- tensors ----

TEST(Tensor, IndexingContractionAndSymmetry) {
  Tensor t = Tensor::lower(2, 2, "t");
  t(0, 1) = 1.0;
  t(1, 0) = 3.0;
  EXPECT_NEAR(symmetry_defect(t), 2.0, 1e-15);
  auto c = contract(t, 1, std::vector<double>{1.0, 2.0});
  EXPECT_EQ(c.rank(), 1);
  EXPECT_NEAR(c(0), 2.0, 1e-15);
  EXPECT_NEAR(c(1), 3.0, 1e-15);
  EXPECT_NEAR(max_abs(t), 3.0, 1e-15);
  Tensor u = Tensor::lower(2, 3);
  EXPECT_THROW(t += u, Error);
}

// ---- jets ----

TEST(Jets, EuclideanHessianContraction) {
  auto m = testmodels::euclidean(2);
  auto jet = eval_jet(m.f2_field(), ChartPoint{{0.1, 0.2}}, FiberVector{{0.6, -0.3}}, 0, 2);
  Vec u{0.4, 1.3};
  EXPECT_NEAR(contract_jet(jet, {}, {u, u}), 2.0 * (0.4 * 0.4 + 1.3 * 1.3), 1e-13);
}

TEST(Jets, ExactMatchesFiniteDifferenceOracle) {
  for (const auto& m : {testmodels::randers(2), testmodels::square(2)}) {
    const ChartPoint p{{0.2, -0.3}};
    const FiberVector y{{0.8, 0.5}};
    auto exact = eval_jet(m.f2_field(), p, y, 2, 3);
    auto fd = fd_reference_jet(m.f2_field(), p, y, 2, 3);
    EXPECT_FALSE(exact.approximate());
    EXPECT_TRUE(fd.approximate());
    double worst = 0.0;
    for (const auto& [e, v] : exact.entries()) {
      const double w = fd.at_exponents(e);
      worst = std::max(worst, std::abs(v - w) / std::max(1.0, std::abs(v)));
    }
    EXPECT_LT(worst, 1e-5);
  }
}

TEST(Jets, BlackBoxFieldsFallBackToDifferences) {
  auto f = ScalarField::black_box([](std::span<const double> x, std::span<const double> y) {
    return std::exp(x[0]) * (y[0] * y[0] + y[1] * y[1]);
  });
  auto jet = eval_jet(f, ChartPoint{{0.3, 0.0}}, FiberVector{{1.0, 0.5}}, 1, 2);
  EXPECT_TRUE(jet.approximate());
  EXPECT_NEAR(jet.at({0}, {0, 0}), 2.0 * std::exp(0.3), 1e-6);
}

TEST(Jets, RejectsBadOrdersAndPoints) {
  auto m = testmodels::euclidean(2);
  EXPECT_THROW(eval_jet(m.f2_field(), ChartPoint{{0, 0}}, FiberVector{{1, 0}}, 3, 0), OrderOverflow);
  EXPECT_THROW(eval_jet(m.f2_field(), ChartPoint{{0, 0}}, FiberVector{{1, 0}}, 0, 5), OrderOverflow);
  EXPECT_THROW(eval_jet(m.f2_field(), ChartPoint{{0, 0}}, FiberVector{{1e-5, 0}}, 0, 2), DomainError);
  EXPECT_THROW(eval_jet(m.f2_field(), ChartPoint{{3, 0}}, FiberVector{{1, 0}}, 0, 2), DomainError);
  auto jet = eval_jet(m.f2_field(), ChartPoint{{0, 0}}, FiberVector{{1, 0}}, 0, 2);
  EXPECT_THROW(jet.at({0}, {}), OrderOverflow);
}

TEST(Jets, StepGrowsWithOrder) {
  StepPolicy p;
  EXPECT_DOUBLE_EQ(p.step_for(1, 0.5), 1e-4);
  EXPECT_GT(p.step_for(4, 1.0), p.step_for(2, 1.0));
  EXPECT_GT(p.step_for(2, 3.0), p.step_for(2, 1.0));
}

// ---- metrics ----

TEST(Metrics, EuclideanTensors) {
  auto m = testmodels::euclidean(2);
  LocalGeometry geo(m, {0.1, 0.2}, {1.0, 0.0});
  Tensor g = evaluate(geo.g()), h = evaluate(geo.h());
  EXPECT_NEAR(g(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(g(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(h(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(h(1, 1), 1.0, 1e-15);
  EXPECT_EQ(max_abs(evaluate(geo.C())), 0.0);
  EXPECT_EQ(max_abs(evaluate(geo.G())), 0.0);
}

// g against a Hessian of F^2 computed by hand-written differences of a
// plain lambda for the same Randers metric.
TEST(Metrics, FundamentalTensorMatchesIndependentHessian) {
  auto m = testmodels::randers(2);
  const Vec x{0.2, 0.4}, y{0.7, -0.2};
  auto f2 = [&](double y0, double y1) {
    const double a = std::sqrt(y0 * y0 + y1 * y1);
    const double b = 0.3 * std::sin(x[1]) * y0;
    return (a + b) * (a + b);
  };
  const double h = 1e-4;
  auto [g, ginv] = fundamental_tensor(m, ChartPoint{x}, FiberVector{y});
  const double g00 = (f2(y[0] + h, y[1]) - 2 * f2(y[0], y[1]) + f2(y[0] - h, y[1])) / (2 * h * h);
  const double g01 = (f2(y[0] + h, y[1] + h) - f2(y[0] + h, y[1] - h) - f2(y[0] - h, y[1] + h) +
                      f2(y[0] - h, y[1] - h)) /
                     (8 * h * h);
  EXPECT_NEAR(g(0, 0), g00, 1e-6);
  EXPECT_NEAR(g(0, 1), g01, 1e-6);
  double id = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int k = 0; k < 2; ++k) s += g(i, k) * ginv(k, j);
      id = std::max(id, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  EXPECT_LT(id, 1e-13);
}

TEST(Metrics, HomogeneityAndCartanIdentities) {
  auto m = testmodels::square(3);
  const Vec x{0.1, -0.2, 0.3}, y{0.5, 0.4, -0.6};
  Vec y2 = y;
  for (double& c : y2) c *= 2.5;
  LocalGeometry a(m, x, y), b(m, x, y2);
  EXPECT_LT(max_abs_diff(evaluate(a.g()), evaluate(b.g())), 1e-13);
  EXPECT_LT(max_abs_diff(evaluate(a.C()), evaluate(b.C()).scaled(2.5)), 1e-13);
  const Tensor c = evaluate(a.C()), h = evaluate(a.h());
  EXPECT_LT(symmetry_defect(c), 1e-14);
  double yc = 0.0, yh = 0.0;
  for (int j = 0; j < 3; ++j) {
    double s = 0.0, t = 0.0;
    for (int i = 0; i < 3; ++i) {
      s += y[static_cast<std::size_t>(i)] * c(i, j, 0);
      t += y[static_cast<std::size_t>(i)] * h(i, j);
    }
    yc = std::max(yc, std::abs(s));
    yh = std::max(yh, std::abs(t));
  }
  EXPECT_LT(yc, 1e-14);
  EXPECT_LT(yh, 1e-14);
}

TEST(Metrics, MatsumotoTorsionSeparatesRandersFromSquare) {
  const ChartPoint p{{0.1, 0.5, -0.2}};
  const FiberVector y{{0.6, -0.3, 0.7}};
  auto [ir, mr] = matsumoto_torsion(testmodels::randers(3), p, y);
  auto [is, ms] = matsumoto_torsion(testmodels::square(3), p, y);
  EXPECT_LT(max_abs(mr), 1e-12);
  EXPECT_GT(max_abs(ir), 1e-2);
  EXPECT_GT(max_abs(ms), 1e-3);
}

TEST(Metrics, ConstructorValidation) {
  MetricSpec s;
  s.family = Family::kRiemannian;
  s.dimension = 2;
  s.domain = testmodels::cube(2);
  s.a = {{"1", "0.1"}, {"0", "1"}};
  EXPECT_THROW(build_metric(s), InvalidMetric);
  s.a = {{"1", "2"}, {"2", "1"}};
  EXPECT_THROW(build_metric(s), InvalidMetric);

  MetricSpec r;
  r.family = Family::kRanders;
  r.dimension = 2;
  r.domain = testmodels::cube(2);
  r.b = {"1.2", "0"};
  EXPECT_THROW(build_metric(r), InvalidMetric);
  r.b = {};
  EXPECT_THROW(build_metric(r), ConfigError);

  MetricSpec lm;
  lm.family = Family::kLocallyMinkowski;
  lm.dimension = 2;
  lm.domain = testmodels::cube(2);
  lm.a = {{"1 + 0.1*x1", "0"}, {"0", "1"}};
  EXPECT_THROW(build_metric(lm), InvalidMetric);

  EXPECT_THROW(parse_family("kropina"), ConfigError);
}

TEST(Metrics, FiberFloorAndDomainChecks) {
  auto m = testmodels::euclidean(2);
  EXPECT_THROW(LocalGeometry(m, {0.0, 0.0}, {1e-4, 0.0}), DomainError);
  EXPECT_THROW(LocalGeometry(m, {1.5, 0.0}, {1.0, 0.0}), DomainError);
  EXPECT_NO_THROW(LocalGeometry(m, {0.0, 0.0}, {1e-2, 0.0}));
}

// ---- sampling and parallel map ----

TEST(Sampling, DeterministicAndAdmissible) {
  SamplePlan plan;
  plan.count = 30;
  plan.seed = 42;
  const Box box = testmodels::cube(3, -2.0, 1.0);
  auto a = draw_samples(box, plan), b = draw_samples(box, plan);
  ASSERT_EQ(a.size(), 30U);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_EQ(a[i].index, static_cast<int>(i));
    for (double c : a[i].x) {
      EXPECT_GE(c, -2.0 + 0.3 - 1e-12);
      EXPECT_LE(c, 1.0 - 0.3 + 1e-12);
    }
    EXPECT_GE(euclidean_norm(a[i].y), 0.25);
  }
  plan.seed = 43;
  auto c = draw_samples(box, plan);
  EXPECT_NE(a[0].x, c[0].x);
  plan.count = 0;
  EXPECT_THROW(draw_samples(box, plan), ConfigError);
}

TEST(Parallel, OrderedResultsAndLowestIndexError) {
  auto r = parallel_map(50, [](int i) { return i * i; });
  ASSERT_EQ(r.size(), 50U);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(r[static_cast<std::size_t>(i)], i * i);
  try {
    parallel_map(40, [](int i) {
      if (i == 7 || i == 31) throw std::runtime_error("bad " + std::to_string(i));
      return i;
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "bad 7");
  }
}

TEST(Parallel, ThreadBudgetHonorsEnvironment) {
  setenv("FINSLERLAB_THREADS", "3", 1);
  EXPECT_EQ(thread_budget(), 3);
  setenv("FINSLERLAB_THREADS", "zero", 1);
  EXPECT_GE(thread_budget(), 1);
  unsetenv("FINSLERLAB_THREADS");
}
