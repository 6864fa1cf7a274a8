#pragma once

// Mixed partial derivatives of scalar fields f(x, y) on chart x fiber.
//
// Two independent routes produce a JetTable: eval_jet expands f exactly in
// the truncated Taylor algebra; fd_reference_jet uses nested central
// differences with Richardson extrapolation and serves as the oracle.

#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/taylor.hpp"

namespace finslerlab {

using Vec = std::vector<double>;

inline constexpr double kDefaultFiberFloor = 1e-3;
inline constexpr int kMaxJetXOrder = 2;
inline constexpr int kMaxJetYOrder = 4;
inline constexpr int kMaxJetTotalOrder = 5;

struct ChartPoint {
  Vec x;
  int dim() const { return static_cast<int>(x.size()); }
};

struct FiberVector {
  Vec y;
  int dim() const { return static_cast<int>(y.size()); }
};

inline double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// Axis-aligned chart domain.
struct Box {
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(lower.size()); }

  bool contains(std::span<const double> x) const {
    if (x.size() != lower.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    return true;
  }

  Vec center() const {
    Vec c(lower.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
  }
};

inline void check_chart_point(const ChartPoint& p, const Box* domain) {
  if (p.dim() < 2) throw DomainError("chart point: dimension must be at least 2");
  for (double v : p.x)
    if (!std::isfinite(v)) throw DomainError("chart point: non-finite coordinate");
  if (domain && !domain->contains(p.x)) throw DomainError("chart point outside chart domain");
}

inline void check_fiber_vector(const FiberVector& y, int n, double floor = kDefaultFiberFloor) {
  if (y.dim() != n) throw DomainError("fiber vector: dimension mismatch");
  for (double v : y.y)
    if (!std::isfinite(v)) throw DomainError("fiber vector: non-finite component");
  if (euclidean_norm(y.y) < floor) throw DomainError("fiber vector below fiber floor");
}

// A smooth scalar field on chart x fiber. Fields built from generic callables
// can be expanded exactly; black-box fields only provide values.
class ScalarField {
 public:
  using ExactFn = std::function<Taylor(std::span<const Taylor>, std::span<const Taylor>)>;
  using ValueFn = std::function<double(std::span<const double>, std::span<const double>)>;

  // `f` must be callable as f(span<const T> x, span<const T> y) for T in
  // {double, Taylor}.
  template <class F>
  static ScalarField expression(F f, std::optional<Box> domain = std::nullopt) {
    ScalarField s;
    s.exact_ = [f](std::span<const Taylor> x, std::span<const Taylor> y) { return Taylor(f(x, y)); };
    s.value_ = [f](std::span<const double> x, std::span<const double> y) { return static_cast<double>(f(x, y)); };
    s.domain_ = std::move(domain);
    return s;
  }

  static ScalarField black_box(ValueFn f, std::optional<Box> domain = std::nullopt) {
    ScalarField s;
    s.value_ = std::move(f);
    s.domain_ = std::move(domain);
    return s;
  }

  bool exact() const { return static_cast<bool>(exact_); }
  const std::optional<Box>& domain() const { return domain_; }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    if (domain_ && !domain_->contains(x)) throw DomainError("scalar field evaluated outside chart domain");
    return value_(x, y);
  }

  Taylor expand(std::span<const Taylor> x, std::span<const Taylor> y) const {
    if (!exact_) throw Error("scalar field: no exact expansion for a black-box field");
    return exact_(x, y);
  }

 private:
  ExactFn exact_;
  ValueFn value_;
  std::optional<Box> domain_;
};

// Derivatives keyed by the exponent vector (x exponents, then y exponents).
class JetTable {
 public:
  JetTable() = default;
  JetTable(int n, int max_x, int max_y, bool approximate)
      : n_(n), max_x_(max_x), max_y_(max_y), approximate_(approximate) {}

  int dim() const { return n_; }
  int max_x_order() const { return max_x_; }
  int max_y_order() const { return max_y_; }
  bool approximate() const { return approximate_; }
  const std::map<std::vector<int>, double>& entries() const { return values_; }

  void set(const std::vector<int>& exps, double v) { values_[exps] = v; }

  double at_exponents(const std::vector<int>& exps) const {
    auto it = values_.find(exps);
    if (it == values_.end()) throw OrderOverflow("jet table: derivative not stored");
    return it->second;
  }

  // Derivative with respect to the listed coordinates, e.g. at({0}, {0, 0, 0})
  // is d^4 f / dx^1 dy^1 dy^1 dy^1 (0-based indices).
  double at(std::initializer_list<int> x_dirs, std::initializer_list<int> y_dirs) const {
    return at_exponents(exponents_for(x_dirs, y_dirs));
  }

  std::vector<int> exponents_for(std::span<const int> x_dirs, std::span<const int> y_dirs) const {
    std::vector<int> e(static_cast<std::size_t>(2 * n_), 0);
    for (int i : x_dirs) e.at(static_cast<std::size_t>(i)) += 1;
    for (int i : y_dirs) e.at(static_cast<std::size_t>(n_ + i)) += 1;
    return e;
  }
  std::vector<int> exponents_for(std::initializer_list<int> x_dirs, std::initializer_list<int> y_dirs) const {
    return exponents_for(std::span<const int>(x_dirs.begin(), x_dirs.size()),
                         std::span<const int>(y_dirs.begin(), y_dirs.size()));
  }

 private:
  int n_ = 0;
  int max_x_ = 0;
  int max_y_ = 0;
  bool approximate_ = false;
  std::map<std::vector<int>, double> values_;
};

namespace detail {

inline void check_jet_orders(int max_x, int max_y) {
  if (max_x < 0 || max_y < 0 || max_x > kMaxJetXOrder || max_y > kMaxJetYOrder)
    throw OrderOverflow("jet orders exceed (x <= 2, y <= 4)");
}

// All exponent vectors with |alpha| <= max_x, |beta| <= max_y, total <= 5.
inline std::vector<std::vector<int>> jet_multi_indices(int n, int max_x, int max_y) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
  std::function<void(int, int, int)> rec = [&](int var, int xs, int ys) {
    if (var == 2 * n) {
      out.push_back(e);
      return;
    }
    const bool is_x = var < n;
    const int room_part = is_x ? max_x - xs : max_y - ys;
    const int room_total = kMaxJetTotalOrder - xs - ys;
    for (int k = 0; k <= std::min(room_part, room_total); ++k) {
      e[static_cast<std::size_t>(var)] = k;
      rec(var + 1, is_x ? xs + k : xs, is_x ? ys : ys + k);
    }
    e[static_cast<std::size_t>(var)] = 0;
  };
  rec(0, 0, 0);
  return out;
}

}  // namespace detail

struct StepPolicy {
  double base_step = 1e-4;  // scaled by max(1, |y|)
  int richardson_levels = 2;  // one level leaves order-5 entries near 1e-4
  // Grow the step with derivative order so rounding (~eps / h^k) stays below
  // the extrapolated truncation error; the base step governs orders <= 2.
  bool order_adaptive = true;

  double step_for(int order, double y_scale) const {
    double h = base_step * std::max(1.0, y_scale);
    if (order_adaptive && order >= 2) {
      const double balanced =
          std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2.0 * richardson_levels + 2.0)) *
          std::max(1.0, y_scale);
      h = std::max(h, balanced);
    }
    return h;
  }
};

inline JetTable fd_reference_jet(const ScalarField& f, const ChartPoint& p, const FiberVector& y, int max_x, int max_y,
                                 const StepPolicy& policy = {}, double fiber_floor = kDefaultFiberFloor) {
  detail::check_jet_orders(max_x, max_y);
  const int n = p.dim();
  check_chart_point(p, f.domain() ? &*f.domain() : nullptr);
  check_fiber_vector(y, n, fiber_floor);
  if (policy.base_step <= 0.0 || policy.richardson_levels < 0) throw Error("fd jet: invalid step policy");
  const double y_scale = euclidean_norm(y.y);

  JetTable table(n, max_x, max_y, true);
  Vec xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));

  for (const auto& e : detail::jet_multi_indices(n, max_x, max_y)) {
    std::vector<int> dirs;
    for (int v = 0; v < 2 * n; ++v)
      for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k) dirs.push_back(v);
    const int order = static_cast<int>(dirs.size());
    if (order == 0) {
      double v0 = f(p.x, y.y);
      if (!std::isfinite(v0)) throw NonFiniteValue("fd jet: non-finite sample");
      table.set(e, v0);
      continue;
    }

    auto central = [&](double h) {
      // Nested central differences: sum over sign patterns of the stencil.
      int x_reach = 0, y_reach = 0;
      for (int d : dirs) (d < n ? x_reach : y_reach) += 1;
      if (euclidean_norm(y.y) - y_reach * h * std::sqrt(static_cast<double>(n)) < fiber_floor)
        throw DomainError("fd jet: step underflow against fiber floor");
      double sum = 0.0;
      const std::size_t patterns = std::size_t{1} << dirs.size();
      for (std::size_t mask = 0; mask < patterns; ++mask) {
        xs = p.x;
        ys = y.y;
        double sign = 1.0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
          const double s = (mask >> k) & 1U ? -1.0 : 1.0;
          sign *= s;
          const int d = dirs[k];
          if (d < n) {
            xs[static_cast<std::size_t>(d)] += s * h;
          } else {
            ys[static_cast<std::size_t>(d - n)] += s * h;
          }
        }
        const double v = f(xs, ys);
        if (!std::isfinite(v)) throw NonFiniteValue("fd jet: non-finite sample");
        sum += sign * v;
      }
      (void)x_reach;
      return sum / std::pow(2.0 * h, order);
    };

    const double h = policy.step_for(order, y_scale);
    // Richardson tableau on the even error expansion of central differences.
    std::vector<double> level;
    for (int r = 0; r <= policy.richardson_levels; ++r) level.push_back(central(h / std::pow(2.0, r)));
    for (int m = 1; m <= policy.richardson_levels; ++m) {
      const double w = std::pow(4.0, m);
      for (std::size_t r = level.size() - 1; r >= static_cast<std::size_t>(m); --r) {
        level[r] = (w * level[r] - level[r - 1]) / (w - 1.0);
      }
    }
    table.set(e, level.back());
  }
  return table;
}

inline JetTable eval_jet(const ScalarField& f, const ChartPoint& p, const FiberVector& y, int max_x, int max_y,
                         double fiber_floor = kDefaultFiberFloor) {
  detail::check_jet_orders(max_x, max_y);
  const int n = p.dim();
  check_chart_point(p, f.domain() ? &*f.domain() : nullptr);
  check_fiber_vector(y, n, fiber_floor);
  if (!f.exact()) return fd_reference_jet(f, p, y, max_x, max_y, StepPolicy{}, fiber_floor);

  const int order = std::min(max_x + max_y, kMaxJetTotalOrder);
  const auto& space = TaylorSpace::get(2 * n, order);
  std::vector<Taylor> xs, ys;
  for (int i = 0; i < n; ++i) {
    xs.push_back(Taylor::variable(space, i, p.x[static_cast<std::size_t>(i)], order));
    ys.push_back(Taylor::variable(space, n + i, y.y[static_cast<std::size_t>(i)], order));
  }
  Taylor t = f.expand(xs, ys);
  if (t.is_constant()) t = Taylor(space, t.value(), order);
  if (!t.all_finite()) throw NonFiniteValue("eval_jet: non-finite intermediate");

  JetTable table(n, max_x, max_y, false);
  for (const auto& e : detail::jet_multi_indices(n, max_x, max_y)) table.set(e, t.partial(e));
  return table;
}

// Multilinear contraction of the symmetric derivative tensor
// d^{p+q} f / dx^p dy^q with the given directions.
inline double contract_jet(const JetTable& t, const std::vector<Vec>& x_dirs, const std::vector<Vec>& y_dirs) {
  const int n = t.dim();
  if (static_cast<int>(x_dirs.size()) > t.max_x_order() || static_cast<int>(y_dirs.size()) > t.max_y_order() ||
      x_dirs.size() + y_dirs.size() > static_cast<std::size_t>(kMaxJetTotalOrder))
    throw OrderOverflow("contract_jet: more directions than stored orders");
  for (const auto& d : x_dirs)
    if (static_cast<int>(d.size()) != n) throw Error("contract_jet: direction length mismatch");
  for (const auto& d : y_dirs)
    if (static_cast<int>(d.size()) != n) throw Error("contract_jet: direction length mismatch");

  const std::size_t slots = x_dirs.size() + y_dirs.size();
  std::vector<int> idx(slots, 0);
  double total = 0.0;
  for (;;) {
    double weight = 1.0;
    std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
    for (std::size_t s = 0; s < slots; ++s) {
      const bool is_x = s < x_dirs.size();
      const Vec& dir = is_x ? x_dirs[s] : y_dirs[s - x_dirs.size()];
      weight *= dir[static_cast<std::size_t>(idx[s])];
      e[static_cast<std::size_t>(is_x ? idx[s] : n + idx[s])] += 1;
    }
    if (weight != 0.0) total += weight * t.at_exponents(e);
    std::size_t s = 0;
    while (s < slots && ++idx[s] == n) idx[s++] = 0;
    if (s == slots) break;
  }
  return total;
}

}  // namespace finslerlab
