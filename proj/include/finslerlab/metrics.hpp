#pragma once

// Finsler metric models and their pointwise tensors.
//
// A model is assembled from expressions: a Riemannian part a_ij(x), an
// optional one-form b_i(x) and, for (alpha, beta)-metrics, a profile phi(s).
// LocalGeometry expands F^2 around one (x, y) in the Taylor algebra over the
// 2n variables (x, y) and derives every metric-level tensor from it.

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/expression.hpp"
#include "finslerlab/jets.hpp"
#include "finslerlab/taylor.hpp"
#include "finslerlab/tensor.hpp"

namespace finslerlab {

enum class Family { kRiemannian, kRanders, kAlphaBeta, kLocallyMinkowski };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::kRiemannian: return "riemannian";
    case Family::kRanders: return "randers";
    case Family::kAlphaBeta: return "alpha_beta";
    case Family::kLocallyMinkowski: return "locally_minkowski";
  }
  return "unknown";
}

inline Family parse_family(const std::string& s) {
  if (s == "riemannian") return Family::kRiemannian;
  if (s == "randers") return Family::kRanders;
  if (s == "alpha_beta") return Family::kAlphaBeta;
  if (s == "locally_minkowski") return Family::kLocallyMinkowski;
  throw ConfigError("unknown metric family '" + s + "'");
}

// Family descriptor. Expressions use the chart coordinates x1..xn; phi uses s.
struct MetricSpec {
  Family family = Family::kRiemannian;
  int dimension = 2;
  Box domain;
  std::vector<std::vector<std::string>> a;  // n x n; empty means identity
  std::vector<std::string> b;               // empty means zero
  std::string phi;                          // alpha_beta only; e.g. "(1+s)^2"
  double b0 = 1.0;                          // phi is assumed smooth on (-b0, b0)
};

inline std::vector<std::string> coordinate_names(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

class MetricModel;
inline MetricModel build_metric(const MetricSpec& spec);

class MetricModel {
 public:
  Family family() const { return family_; }
  int dim() const { return n_; }
  const Box& domain() const { return domain_; }
  double b0() const { return b0_; }
  bool has_b() const { return has_b_; }
  const MetricSpec& spec() const { return spec_; }

  const Expression& a_expr(int i, int j) const { return a_[index(i, j)]; }
  const Expression& b_expr(int i) const { return b_[static_cast<std::size_t>(i)]; }
  const Expression& phi_expr() const { return phi_; }

  template <class T>
  T alpha2(std::span<const T> x, std::span<const T> y) const {
    T s(0.0);
    for (int i = 0; i < n_; ++i) {
      s = s + a_[index(i, i)].eval<T>(x) * y[ui(i)] * y[ui(i)];
      for (int j = i + 1; j < n_; ++j) s = s + 2.0 * a_[index(i, j)].eval<T>(x) * y[ui(i)] * y[ui(j)];
    }
    return s;
  }

  template <class T>
  T beta(std::span<const T> x, std::span<const T> y) const {
    T s(0.0);
    if (!has_b_) return s;
    for (int i = 0; i < n_; ++i) s = s + b_[ui(i)].eval<T>(x) * y[ui(i)];
    return s;
  }

  template <class T>
  T f2(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    T a2 = alpha2(x, y);
    switch (kind_) {
      case Kind::kQuadratic:
        return a2;
      case Kind::kRanders: {
        T f = sqrt(a2) + beta(x, y);
        return f * f;
      }
      case Kind::kProfile: {
        T alpha = sqrt(a2);
        std::array<T, 1> s{beta(x, y) / alpha};
        T p = phi_.eval<T>(std::span<const T>(s));
        return a2 * p * p;
      }
    }
    throw Error("metric: corrupt model");
  }

  double F(std::span<const double> x, std::span<const double> y) const {
    double v = f2(x, y);
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidMetric("metric: F^2 not positive");
    return std::sqrt(v);
  }

  ScalarField f2_field() const {
    MetricModel self = *this;
    return ScalarField::expression([self](auto x, auto y) { return self.f2(x, y); }, domain_);
  }

  // a_ij(x) and b_i(x) values.
  std::vector<double> a_matrix(std::span<const double> x) const {
    std::vector<double> m(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m[ui(i * n_ + j)] = a_[index(i, j)].eval(x);
    return m;
  }
  std::vector<double> b_vector(std::span<const double> x) const {
    std::vector<double> v(static_cast<std::size_t>(n_), 0.0);
    if (has_b_)
      for (int i = 0; i < n_; ++i) v[ui(i)] = b_[ui(i)].eval(x);
    return v;
  }

 private:
  enum class Kind { kQuadratic, kRanders, kProfile };
  friend MetricModel build_metric(const MetricSpec& spec);

  static std::size_t ui(int i) { return static_cast<std::size_t>(i); }
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i * n_ + j);
  }

  MetricSpec spec_;
  Family family_ = Family::kRiemannian;
  Kind kind_ = Kind::kQuadratic;
  int n_ = 0;
  Box domain_;
  double b0_ = 1.0;
  bool has_b_ = false;
  std::vector<Expression> a_;  // upper triangle used
  std::vector<Expression> b_;
  Expression phi_;
};

namespace detail {

// Gauss-Jordan inverse with partial pivoting on the base values.
template <class T>
std::vector<T> invert(std::vector<T> m, int n) {
  std::vector<T> inv(static_cast<std::size_t>(n * n), T(0.0));
  auto at = [n](std::vector<T>& v, int i, int j) -> T& { return v[static_cast<std::size_t>(i * n + j)]; };
  for (int i = 0; i < n; ++i) at(inv, i, i) = T(1.0);
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(at(m, r, c))) > std::abs(value_of(at(m, pivot, c)))) pivot = r;
    if (value_of(at(m, pivot, c)) == 0.0) throw IndefiniteMetric("singular matrix");
    if (pivot != c) {
      for (int j = 0; j < n; ++j) {
        std::swap(at(m, c, j), at(m, pivot, j));
        std::swap(at(inv, c, j), at(inv, pivot, j));
      }
    }
    T d = T(1.0) / at(m, c, c);
    for (int j = 0; j < n; ++j) {
      at(m, c, j) = at(m, c, j) * d;
      at(inv, c, j) = at(inv, c, j) * d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      T f = at(m, r, c);
      for (int j = 0; j < n; ++j) {
        at(m, r, j) = at(m, r, j) - f * at(m, c, j);
        at(inv, r, j) = at(inv, r, j) - f * at(inv, c, j);
      }
    }
  }
  return inv;
}

inline bool cholesky_positive(const std::vector<double>& m, int n) {
  std::vector<double> l(m.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    double d = m[static_cast<std::size_t>(j * n + j)];
    for (int k = 0; k < j; ++k) d -= l[static_cast<std::size_t>(j * n + k)] * l[static_cast<std::size_t>(j * n + k)];
    if (!(d > 0.0)) return false;
    l[static_cast<std::size_t>(j * n + j)] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) s -= l[static_cast<std::size_t>(i * n + k)] * l[static_cast<std::size_t>(j * n + k)];
      l[static_cast<std::size_t>(i * n + j)] = s / l[static_cast<std::size_t>(j * n + j)];
    }
  }
  return true;
}

// Points strictly inside the box on a 3^n grid and a fixed set of directions.
inline std::vector<Vec> validation_points(const Box& box) {
  const int n = box.dim();
  std::vector<Vec> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const double fractions[3] = {0.15, 0.5, 0.85};
  for (;;) {
    Vec p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      p[u] = box.lower[u] + fractions[idx[u]] * (box.upper[u] - box.lower[u]);
    }
    pts.push_back(std::move(p));
    int k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == 3) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return pts;
}

inline std::vector<Vec> validation_directions(int n) {
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    Vec e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(e);
    e[static_cast<std::size_t>(i)] = -1.0;
    dirs.push_back(e);
  }
  Vec d1(static_cast<std::size_t>(n)), d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d1[static_cast<std::size_t>(i)] = 1.0 / (1.0 + i);
    d2[static_cast<std::size_t>(i)] = (i % 2 == 0 ? -0.7 : 0.4) + 0.1 * i;
  }
  dirs.push_back(d1);
  dirs.push_back(d2);
  return dirs;
}

inline std::vector<double> metric_values_at(const MetricModel& m, const Vec& x, const Vec& y);

}  // namespace detail

inline MetricModel build_metric(const MetricSpec& spec) {
  const int n = spec.dimension;
  if (n < 2) throw ConfigError("metric: dimension must be at least 2");
  if (spec.domain.dim() != n || static_cast<int>(spec.domain.upper.size()) != n)
    throw ConfigError("metric: chart domain must have one interval per coordinate");
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!(spec.domain.lower[u] < spec.domain.upper[u])) throw ConfigError("metric: empty chart domain");
  }

  MetricModel m;
  m.spec_ = spec;
  m.family_ = spec.family;
  m.n_ = n;
  m.domain_ = spec.domain;
  m.b0_ = spec.b0;
  const auto names = coordinate_names(n);

  m.a_.assign(static_cast<std::size_t>(n * n), Expression(0.0));
  std::vector<Expression> lower_tri(static_cast<std::size_t>(n * n), Expression(0.0));
  if (spec.a.empty()) {
    for (int i = 0; i < n; ++i) m.a_[static_cast<std::size_t>(i * n + i)] = Expression(1.0);
    lower_tri = m.a_;
  } else {
    if (static_cast<int>(spec.a.size()) != n) throw ConfigError("metric: a must be an n x n matrix");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(spec.a[static_cast<std::size_t>(i)].size()) != n)
        throw ConfigError("metric: a must be an n x n matrix");
      for (int j = 0; j < n; ++j) {
        auto e = Expression::parse(spec.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], names);
        if (i <= j) m.a_[static_cast<std::size_t>(i * n + j)] = e;
        if (i >= j) lower_tri[static_cast<std::size_t>(j * n + i)] = e;
      }
    }
  }

  if (!spec.b.empty()) {
    if (static_cast<int>(spec.b.size()) != n) throw ConfigError("metric: b must have n entries");
    for (const auto& s : spec.b) m.b_.push_back(Expression::parse(s, names));
    m.has_b_ = true;
  }

  switch (spec.family) {
    case Family::kRiemannian:
      if (m.has_b_) throw ConfigError("metric: riemannian family takes no b");
      m.kind_ = MetricModel::Kind::kQuadratic;
      break;
    case Family::kRanders:
      if (!m.has_b_) throw ConfigError("metric: randers family requires b");
      m.kind_ = MetricModel::Kind::kRanders;
      break;
    case Family::kAlphaBeta:
      if (!m.has_b_) throw ConfigError("metric: alpha_beta family requires b");
      if (spec.phi.empty()) throw ConfigError("metric: alpha_beta family requires phi");
      if (!(spec.b0 > 0.0)) throw ConfigError("metric: b0 must be positive");
      m.phi_ = Expression::parse(spec.phi, {"s"});
      m.kind_ = MetricModel::Kind::kProfile;
      break;
    case Family::kLocallyMinkowski:
      if (!spec.phi.empty()) {
        if (!m.has_b_) throw ConfigError("metric: phi requires b");
        m.phi_ = Expression::parse(spec.phi, {"s"});
        m.kind_ = MetricModel::Kind::kProfile;
      } else {
        m.kind_ = m.has_b_ ? MetricModel::Kind::kRanders : MetricModel::Kind::kQuadratic;
      }
      for (const auto& e : m.a_)
        if (!e.is_constant()) throw InvalidMetric("metric: locally_minkowski requires x-independent a");
      for (const auto& e : m.b_)
        if (!e.is_constant()) throw InvalidMetric("metric: locally_minkowski requires x-independent b");
      break;
  }

  // Validation grid.
  const auto points = detail::validation_points(m.domain_);
  const auto dirs = detail::validation_directions(n);
  for (const auto& x : points) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double upper = m.a_[static_cast<std::size_t>(i * n + j)].eval(x);
        double lower = lower_tri[static_cast<std::size_t>(i * n + j)].eval(x);
        if (std::abs(upper - lower) > 1e-12 * std::max(1.0, std::abs(upper)))
          throw InvalidMetric("metric: a is not symmetric");
      }
    auto a = m.a_matrix(x);
    for (double v : a)
      if (!std::isfinite(v)) throw InvalidMetric("metric: non-finite a");
    if (!detail::cholesky_positive(a, n)) throw InvalidMetric("metric: a is not positive definite");
    if (m.has_b_) {
      auto b = m.b_vector(x);
      auto ainv = detail::invert(a, n);
      double norm2 = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          norm2 += b[static_cast<std::size_t>(i)] * ainv[static_cast<std::size_t>(i * n + j)] * b[static_cast<std::size_t>(j)];
      const double norm = std::sqrt(std::max(0.0, norm2));
      if (m.kind_ == MetricModel::Kind::kRanders && !(norm < 1.0)) throw InvalidMetric("Randers slope >= 1");
      if (m.kind_ == MetricModel::Kind::kProfile && !(norm < m.b0_))
        throw InvalidMetric("metric: |b|_a must stay below b0");
    }
    for (const auto& y : dirs) {
      double f = 0.0, f2x = 0.0;
      try {
        f = m.F(x, y);
        Vec y2 = y;
        for (double& c : y2) c *= 2.0;
        f2x = m.F(x, y2);
      } catch (const NonFiniteValue& e) {
        throw InvalidMetric(std::string("metric: ") + e.what());
      }
      if (!std::isfinite(f) || !(f > 0.0)) throw InvalidMetric("metric: F must be positive");
      if (std::abs(f2x - 2.0 * f) > 1e-10 * f) throw InvalidMetric("metric: F is not 1-homogeneous");
      auto g = detail::metric_values_at(m, x, y);
      if (!detail::cholesky_positive(g, n)) throw IndefiniteMetric("metric: g_y is not positive definite");
    }
  }
  return m;
}

// The tensors of the model around one point of the slit tangent bundle.
//
// Fields are expansions in the 2n variables (x, y). `order` is the truncation
// order of F^2; each derived field loses one order per derivative taken, so
// the default keeps values of everything up to the generalized Landsberg
// tensor, the Berwald tensor and the y-gradient of the flag curvature.
class LocalGeometry {
 public:
  static constexpr int kFullOrder = 5;

  LocalGeometry(const MetricModel& model, const Vec& x, const Vec& y, int order = kFullOrder,
                double fiber_floor = kDefaultFiberFloor)
      : n_(model.dim()), x_(x), y_(y), space_(&TaylorSpace::get(2 * model.dim(), order)) {
    if (order < 2) throw OrderOverflow("local geometry: order must be at least 2");
    check_chart_point(ChartPoint{x}, &model.domain());
    check_fiber_vector(FiberVector{y}, n_, fiber_floor);
    for (int i = 0; i < n_; ++i) {
      xv_.push_back(Taylor::variable(*space_, i, x[u(i)], order));
      yv_.push_back(Taylor::variable(*space_, n_ + i, y[u(i)], order));
    }
    f2_ = model.f2<Taylor>(xv_, yv_);
    if (f2_.is_constant()) f2_ = Taylor(*space_, f2_.value(), order);
    if (!f2_.all_finite()) throw NonFiniteValue("metric: non-finite expansion of F^2");
    if (!(f2_.value() > 0.0)) throw InvalidMetric("metric: F^2 not positive");
    f_ = sqrt(f2_);
    build();
  }

  int dim() const { return n_; }
  const Vec& x() const { return x_; }
  const Vec& y() const { return y_; }
  const TaylorSpace& space() const { return *space_; }
  const std::vector<Taylor>& y_field() const { return yv_; }

  const Taylor& F2() const { return f2_; }
  const Taylor& F() const { return f_; }
  const TensorField& g() const { return g_; }
  const TensorField& ginv() const { return ginv_; }
  const TensorField& y_lower() const { return ylow_; }
  const TensorField& h() const { return h_; }
  const TensorField& C() const { return c_; }
  const TensorField& C_up() const { return c_up_; }
  const TensorField& A() const { return a_; }
  const TensorField& A_up() const { return a_up_; }
  const TensorField& I() const { return i_; }
  const TensorField& M() const { return m_; }
  const TensorField& G() const { return spray_; }
  const TensorField& N() const { return nl_; }
  const TensorField& dN() const { return dn_; }
  const TensorField& gamma() const { return gamma_; }
  const TensorField& L() const { return l_; }
  const TensorField& L_up() const { return l_up_; }
  const TensorField& J() const { return j_; }
  const TensorField& Lbar() const { return lbar_; }
  const TensorField& riemann() const { return riemann_; }

  Taylor dx(const Taylor& f, int k) const { return f.derivative(k); }
  Taylor dy(const Taylor& f, int k) const { return f.derivative(n_ + k); }

  // delta_k = d/dx^k - N^m_k d/dy^m
  Taylor delta(const Taylor& f, int k) const {
    Taylor r = f.derivative(k);
    for (int m = 0; m < n_; ++m) r = r - nl_(m, k) * f.derivative(n_ + m);
    return r;
  }

  TensorField delta(const TensorField& t, int k) const {
    TensorField r = t;
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = delta(t[i], k);
    return r;
  }

  TensorField dy(const TensorField& t, int k) const {
    TensorField r = t;
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = dy(t[i], k);
    return r;
  }

  // Lowers the first (upper) slot of a mixed tensor with g.
  TensorField lower_first(const TensorField& t) const {
    TensorField r(n_, std::vector<Slot>(t.slots().size(), Slot::kLower), t.tag());
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      auto idx = t.unflatten(flat);
      Taylor s(0.0);
      const int i = idx[0];
      for (int m = 0; m < n_; ++m) {
        idx[0] = m;
        s = s + g_(i, m) * t[t.flatten(idx)];
      }
      idx[0] = i;
      r[flat] = s;
    }
    return r;
  }

  // Raises the first slot with g^-1.
  TensorField raise_first(const TensorField& t) const {
    std::vector<Slot> slots = t.slots();
    slots[0] = Slot::kUpper;
    TensorField r(n_, slots, t.tag());
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      auto idx = t.unflatten(flat);
      Taylor s(0.0);
      const int i = idx[0];
      for (int m = 0; m < n_; ++m) {
        idx[0] = m;
        s = s + ginv_(i, m) * t[t.flatten(idx)];
      }
      r[flat] = s;
    }
    return r;
  }

 private:
  static std::size_t u(int i) { return static_cast<std::size_t>(i); }

  TensorField upper1() const { return TensorField(n_, {Slot::kUpper}); }

  void build() {
    const int n = n_;
    g_ = TensorField::lower(n, 2, "g", true);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Taylor v = 0.5 * dy(dy(f2_, i), j);
        g_(i, j) = v;
        g_(j, i) = v;
      }
    std::vector<double> gv(u(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gv[u(i * n + j)] = g_(i, j).valid() ? g_(i, j).value() : 0.0;
    if (g_(0, 0).valid() && !detail::cholesky_positive(gv, n))
      throw IndefiniteMetric("metric: g_y is not positive definite");
    ginv_ = TensorField(n, {Slot::kUpper, Slot::kUpper}, "g_inv", true);
    {
      std::vector<Taylor> m(g_.data());
      auto inv = detail::invert(m, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ginv_(i, j) = inv[u(i * n + j)];
    }

    ylow_ = TensorField::lower(n, 1, "y_lower");
    for (int i = 0; i < n; ++i) {
      Taylor s(0.0);
      for (int j = 0; j < n; ++j) s = s + g_(i, j) * yv_[u(j)];
      ylow_(i) = s;
    }
    h_ = TensorField::lower(n, 2, "h", true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h_(i, j) = g_(i, j) - ylow_(i) * ylow_(j) / f2_;

    c_ = TensorField::lower(n, 3, "C", true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) c_(i, j, k) = 0.5 * dy(g_(i, j), k);
    c_up_ = raise_first(c_);
    c_up_.set_tag("C_up");
    a_ = c_.scaled(f_);
    a_.set_tag("A");
    a_up_ = c_up_.scaled(f_);

    i_ = TensorField::lower(n, 1, "I");
    for (int i = 0; i < n; ++i) {
      Taylor s(0.0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s = s + ginv_(j, k) * c_(i, j, k);
      i_(i) = s;
    }
    m_ = TensorField::lower(n, 3, "M", true);
    const double w = 1.0 / (n + 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          m_(i, j, k) = c_(i, j, k) - w * (i_(i) * h_(j, k) + i_(j) * h_(i, k) + i_(k) * h_(i, j));

    // Spray and nonlinear connection.
    spray_ = upper1();
    spray_.set_tag("G");
    std::vector<Taylor> rhs(u(n));
    for (int l = 0; l < n; ++l) {
      Taylor s = -dx(f2_, l);
      for (int k = 0; k < n; ++k) s = s + dy(dx(f2_, k), l) * yv_[u(k)];
      rhs[u(l)] = s;
    }
    for (int i = 0; i < n; ++i) {
      Taylor s(0.0);
      for (int l = 0; l < n; ++l) s = s + ginv_(i, l) * rhs[u(l)];
      spray_(i) = 0.25 * s;
    }
    nl_ = TensorField::mixed(n, 1, "N");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) nl_(i, j) = dy(spray_(i), j);
    dn_ = TensorField::mixed(n, 2, "dN");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) dn_(i, j, k) = dy(nl_(i, j), k);

    // Horizontal coefficients fixed by h-metricity and symmetry.
    std::vector<TensorField> dg;
    for (int k = 0; k < n; ++k) dg.push_back(delta(g_, k));
    TensorField low = TensorField::lower(n, 3, "gamma_lower");
    for (int m = 0; m < n; ++m)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          low(m, j, k) = 0.5 * (dg[u(k)](m, j) + dg[u(j)](m, k) - dg[u(m)](j, k));
    gamma_ = raise_first(low);
    gamma_.set_tag("gamma");

    // Landsberg tensors: horizontal derivatives along y with the Cartan
    // horizontal coefficients.
    l_ = spray_derivative(c_);
    l_.set_tag("L");
    l_.set_symmetric(true);
    l_up_ = raise_first(l_);
    j_ = TensorField::lower(n, 1, "J");
    for (int i = 0; i < n; ++i) {
      Taylor s(0.0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s = s + ginv_(j, k) * l_(i, j, k);
      j_(i) = s;
    }
    lbar_ = spray_derivative(l_);
    lbar_.set_tag("Lbar");
    lbar_.set_symmetric(true);

    riemann_ = TensorField::mixed(n, 1, "R");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        Taylor s = 2.0 * dx(spray_(i), k);
        for (int j = 0; j < n; ++j) {
          s = s - yv_[u(j)] * dy(dx(spray_(i), j), k);
          s = s + 2.0 * spray_(j) * dy(nl_(i, j), k);
          s = s - nl_(i, j) * nl_(j, k);
        }
        riemann_(i, k) = s;
      }
  }

  // y^s X_{..|s} for an all-lower tensor, with the Cartan horizontal part.
  TensorField spray_derivative(const TensorField& t) const {
    TensorField r(n_, t.slots(), t.tag());
    std::vector<TensorField> d;
    for (int s = 0; s < n_; ++s) d.push_back(delta(t, s));
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      auto idx = t.unflatten(flat);
      Taylor acc(0.0);
      for (int s = 0; s < n_; ++s) acc = acc + yv_[u(s)] * d[u(s)][flat];
      // y^s gamma^m_{as} = N^m_a (deflection).
      for (std::size_t slot = 0; slot < idx.size(); ++slot) {
        const int a = idx[slot];
        for (int m = 0; m < n_; ++m) {
          auto j = idx;
          j[slot] = m;
          Taylor ym(0.0);
          for (int s = 0; s < n_; ++s) ym = ym + gamma_(m, a, s) * yv_[u(s)];
          acc = acc - ym * t[t.flatten(j)];
        }
      }
      r[flat] = acc;
    }
    return r;
  }

  int n_;
  Vec x_, y_;
  const TaylorSpace* space_;
  std::vector<Taylor> xv_, yv_;
  Taylor f2_, f_;
  TensorField g_, ginv_, ylow_, h_, c_, c_up_, a_, a_up_, i_, m_;
  TensorField spray_, nl_, dn_, gamma_, l_, l_up_, j_, lbar_, riemann_;
};

namespace detail {

inline std::vector<double> metric_values_at(const MetricModel& m, const Vec& x, const Vec& y) {
  LocalGeometry geo(m, x, y, 2, 0.0);
  const int n = m.dim();
  std::vector<double> g(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(i * n + j)] = geo.g()(i, j).value();
  return g;
}

}  // namespace detail

inline std::pair<Tensor, Tensor> fundamental_tensor(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y, 2);
  return {evaluate(geo.g()), evaluate(geo.ginv())};
}

inline Tensor angular_metric(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y, 2);
  return evaluate(geo.h());
}

inline Tensor cartan_tensor(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y, 3);
  return evaluate(geo.C());
}

// (I, M)
inline std::pair<Tensor, Tensor> matsumoto_torsion(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y, 3);
  return {evaluate(geo.I()), evaluate(geo.M())};
}

}  // namespace finslerlab
