#pragma once

// Truncated multivariate Taylor algebra.
//
// A Taylor value is the expansion of a smooth function around a base point in
// `nvars` variables, truncated at a total degree ("order"). Arithmetic and the
// elementary functions act on expansions exactly (up to rounding), so any
// composition of them yields every mixed partial derivative up to the order
// without step-size error. Derivatives lower the order by one; an expansion
// whose order dropped below zero carries no information and refuses to be read.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/error.hpp"

namespace finslerlab {

class TaylorSpace {
 public:
  struct Product {
    std::uint32_t a, b, r;
  };
  struct DerivativeEntry {
    std::uint32_t src, dst;
    double factor;
  };

  // Spaces are immutable and shared; lookup is thread-safe.
  static const TaylorSpace& get(int nvars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<TaylorSpace>> cache;
    if (nvars < 1 || order < 0 || order > 12) {
      throw OrderOverflow("taylor space: unsupported shape (" + std::to_string(nvars) + " vars, order " +
                          std::to_string(order) + ")");
    }
    std::lock_guard lock(mutex);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot.reset(new TaylorSpace(nvars, order));
    return *slot;
  }

  int nvars() const { return nvars_; }
  int max_order() const { return order_; }

  // Number of monomials of total degree <= order.
  std::size_t size(int order) const {
    if (order < 0) return 0;
    return count_upto_[static_cast<std::size_t>(std::min(order, order_))];
  }

  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exps_.data() + idx * static_cast<std::size_t>(nvars_), static_cast<std::size_t>(nvars_)};
  }

  int degree(std::size_t idx) const { return degree_[idx]; }

  std::size_t index_of(std::span<const int> exps) const {
    std::vector<std::uint8_t> key(exps.begin(), exps.end());
    auto it = lookup_.find(key);
    if (it == lookup_.end()) throw OrderOverflow("taylor space: monomial beyond truncation order");
    return it->second;
  }

  // Product triples whose result has degree <= order.
  std::span<const Product> products(int order) const {
    if (order < 0) return {};
    return {products_.data(), product_end_[static_cast<std::size_t>(std::min(order, order_))]};
  }

  // d/d(var) entries whose destination has degree <= order.
  std::span<const DerivativeEntry> derivative_table(int var, int order) const {
    if (order < 0) return {};
    const auto& table = derivatives_[static_cast<std::size_t>(var)];
    return {table.data(), derivative_end_[static_cast<std::size_t>(var)][static_cast<std::size_t>(std::min(order, order_))]};
  }

 private:
  TaylorSpace(int nvars, int order) : nvars_(nvars), order_(order) {
    std::vector<int> current(static_cast<std::size_t>(nvars), 0);
    for (int d = 0; d <= order; ++d) {
      enumerate(0, d, current);
      count_upto_.push_back(degree_.size());
    }
    const std::size_t count = degree_.size();
    std::vector<int> sum(static_cast<std::size_t>(nvars));
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = 0; b < count; ++b) {
        if (degree_[a] + degree_[b] > order) continue;
        for (int v = 0; v < nvars; ++v) sum[static_cast<std::size_t>(v)] = exponents(a)[static_cast<std::size_t>(v)] + exponents(b)[static_cast<std::size_t>(v)];
        products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             static_cast<std::uint32_t>(index_of(sum))});
      }
    }
    std::stable_sort(products_.begin(), products_.end(),
                     [&](const Product& x, const Product& y) { return degree_[x.r] < degree_[y.r]; });
    for (int d = 0; d <= order; ++d) {
      product_end_.push_back(static_cast<std::size_t>(
          std::count_if(products_.begin(), products_.end(), [&](const Product& p) { return degree_[p.r] <= d; })));
    }
    derivatives_.resize(static_cast<std::size_t>(nvars));
    derivative_end_.resize(static_cast<std::size_t>(nvars));
    std::vector<int> dst(static_cast<std::size_t>(nvars));
    for (int v = 0; v < nvars; ++v) {
      auto& table = derivatives_[static_cast<std::size_t>(v)];
      for (std::size_t src = 0; src < count; ++src) {
        auto e = exponents(src);
        if (e[static_cast<std::size_t>(v)] == 0) continue;
        for (int w = 0; w < nvars; ++w) dst[static_cast<std::size_t>(w)] = e[static_cast<std::size_t>(w)];
        dst[static_cast<std::size_t>(v)] -= 1;
        table.push_back({static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(index_of(dst)),
                         static_cast<double>(e[static_cast<std::size_t>(v)])});
      }
      for (int d = 0; d <= order; ++d) {
        derivative_end_[static_cast<std::size_t>(v)].push_back(static_cast<std::size_t>(
            std::count_if(table.begin(), table.end(), [&](const DerivativeEntry& t) { return degree_[t.dst] <= d; })));
      }
    }
  }

  void enumerate(int var, int remaining, std::vector<int>& current) {
    if (var == nvars_ - 1) {
      current[static_cast<std::size_t>(var)] = remaining;
      std::vector<std::uint8_t> key(current.begin(), current.end());
      lookup_[key] = degree_.size();
      exps_.insert(exps_.end(), key.begin(), key.end());
      int d = 0;
      for (int c : current) d += c;
      degree_.push_back(d);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      current[static_cast<std::size_t>(var)] = k;
      enumerate(var + 1, remaining - k, current);
    }
  }

  int nvars_;
  int order_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> count_upto_;
  std::map<std::vector<std::uint8_t>, std::size_t> lookup_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_end_;
  std::vector<std::vector<DerivativeEntry>> derivatives_;
  std::vector<std::vector<std::size_t>> derivative_end_;
};

class Taylor {
 public:
  static constexpr int kUnbounded = std::numeric_limits<int>::max() / 4;

  // A bare constant belongs to no space and adapts to whatever it meets.
  Taylor(double constant = 0.0) : c_{constant} {}  // NOLINT(google-explicit-constructor)

  Taylor(const TaylorSpace& space, double constant, int order)
      : space_(&space), order_(clamp_order(order, space)), c_(space.size(order_), 0.0) {
    if (!c_.empty()) c_[0] = constant;
  }

  // The expansion of the coordinate function `var` around `value`.
  static Taylor variable(const TaylorSpace& space, int var, double value, int order) {
    Taylor t(space, value, order);
    if (t.order_ >= 1) {
      std::vector<int> e(static_cast<std::size_t>(space.nvars()), 0);
      e[static_cast<std::size_t>(var)] = 1;
      t.c_[space.index_of(e)] = 1.0;
    }
    return t;
  }

  bool is_constant() const { return space_ == nullptr; }
  const TaylorSpace* space() const { return space_; }
  int order() const { return order_; }
  bool valid() const { return order_ >= 0; }

  double value() const {
    if (order_ < 0) throw OrderOverflow("taylor: value requested from an exhausted expansion");
    return c_[0];
  }

  std::span<const double> coefficients() const { return c_; }

  double coefficient(std::size_t idx) const { return idx < c_.size() ? c_[idx] : 0.0; }

  // Mixed partial derivative at the base point for the given exponent vector.
  double partial(std::span<const int> exps) const {
    int degree = 0;
    double factorial = 1.0;
    for (int e : exps) {
      degree += e;
      for (int k = 2; k <= e; ++k) factorial *= k;
    }
    if (degree > order_) throw OrderOverflow("taylor: partial derivative beyond truncation order");
    if (is_constant()) return degree == 0 ? c_[0] : 0.0;
    return c_[space_->index_of(exps)] * factorial;
  }

  bool all_finite() const {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
  }

  Taylor derivative(int var) const {
    if (is_constant()) return Taylor(0.0);
    Taylor r = blank(*space_, order_ - 1);
    for (const auto& entry : space_->derivative_table(var, r.order_)) {
      r.c_[entry.dst] += entry.factor * c_[entry.src];
    }
    return r;
  }

  Taylor truncated(int order) const {
    if (is_constant() || order >= order_) return *this;
    Taylor r = blank(*space_, order);
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
  }

  Taylor operator-() const {
    Taylor r = *this;
    for (double& v : r.c_) v = -v;
    return r;
  }

  Taylor& operator+=(const Taylor& o) { return *this = *this + o; }
  Taylor& operator-=(const Taylor& o) { return *this = *this - o; }
  Taylor& operator*=(const Taylor& o) { return *this = *this * o; }
  Taylor& operator/=(const Taylor& o) { return *this = *this / o; }

  friend Taylor operator+(const Taylor& a, const Taylor& b) { return linear(a, b, 1.0); }
  friend Taylor operator-(const Taylor& a, const Taylor& b) { return linear(a, b, -1.0); }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    if (a.is_constant() && b.is_constant()) return Taylor(a.c_[0] * b.c_[0]);
    if (a.is_constant()) return b.scaled(a.c_[0]);
    if (b.is_constant()) return a.scaled(b.c_[0]);
    check_same(a, b);
    Taylor r = blank(*a.space_, std::min(a.order_, b.order_));
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* pr = r.c_.data();
    for (const auto& p : a.space_->products(r.order_)) pr[p.r] += pa[p.a] * pb[p.b];
    return r;
  }

  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    if (b.is_constant()) return a.scaled(1.0 / b.c_[0]);
    return a * reciprocal(b);
  }

  friend Taylor reciprocal(const Taylor& u) {
    return compose(u, [](double u0, int k) {
      // d^k/du^k u^-1 = (-1)^k k! u^-(k+1)
      double f = 1.0 / u0;
      for (int j = 1; j <= k; ++j) f *= -static_cast<double>(j) / u0;
      return f;
    });
  }

  // f(u) for a univariate f given through its derivatives at the base value:
  // derivative(u0, k) must return f^(k)(u0).
  template <class Derivatives>
  friend Taylor compose(const Taylor& u, Derivatives&& derivative) {
    if (u.is_constant()) return Taylor(derivative(u.c_[0], 0));
    if (u.order_ < 0) return blank(*u.space_, -1);
    const double u0 = u.c_[0];
    Taylor h = u;
    h.c_[0] = 0.0;
    const int order = u.order_;
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    Taylor r(derivative(u0, order) / factorial);
    for (int k = order - 1; k >= 0; --k) {
      factorial /= (k + 1);
      r = r * h + Taylor(derivative(u0, k) / factorial);
    }
    if (r.is_constant()) r = Taylor(*u.space_, r.c_[0], order);
    return r;
  }

 private:
  static int clamp_order(int order, const TaylorSpace& space) {
    return std::max(-1, std::min(order, space.max_order()));
  }

  static Taylor blank(const TaylorSpace& space, int order) {
    Taylor t;
    t.space_ = &space;
    t.order_ = clamp_order(order, space);
    t.c_.assign(space.size(t.order_), 0.0);
    return t;
  }

  static void check_same(const Taylor& a, const Taylor& b) {
    if (a.space_ != b.space_) throw Error("taylor: operands expanded in different spaces");
  }

  Taylor scaled(double s) const {
    Taylor r = *this;
    for (double& v : r.c_) v *= s;
    return r;
  }

  static Taylor linear(const Taylor& a, const Taylor& b, double sign) {
    if (a.is_constant() && b.is_constant()) return Taylor(a.c_[0] + sign * b.c_[0]);
    if (b.is_constant()) {
      Taylor r = a;
      if (!r.c_.empty()) r.c_[0] += sign * b.c_[0];
      return r;
    }
    if (a.is_constant()) {
      Taylor r = b.scaled(sign);
      if (!r.c_.empty()) r.c_[0] += a.c_[0];
      return r;
    }
    check_same(a, b);
    Taylor r = blank(*a.space_, std::min(a.order_, b.order_));
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a.c_[i] + sign * b.c_[i];
    return r;
  }

  const TaylorSpace* space_ = nullptr;
  int order_ = kUnbounded;
  std::vector<double> c_;
};

inline double value_of(double v) { return v; }
inline double value_of(const Taylor& t) { return t.value(); }

inline Taylor sqrt(const Taylor& u) {
  return compose(u, [](double u0, int k) {
    if (!(u0 > 0.0)) throw NonFiniteValue("taylor: sqrt of non-positive value");
    double f = std::sqrt(u0);
    for (int j = 0; j < k; ++j) f *= (0.5 - j) / u0;
    return f;
  });
}

inline Taylor pow(const Taylor& u, double a) {
  return compose(u, [a](double u0, int k) {
    double f = std::pow(u0, a);
    for (int j = 0; j < k; ++j) f *= (a - j) / u0;
    return f;
  });
}

// Integer powers by repeated squaring keep negative bases exact.
inline Taylor pow(const Taylor& u, int p) {
  if (p < 0) return reciprocal(pow(u, -p));
  Taylor result(1.0);
  Taylor base = u;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

inline Taylor exp(const Taylor& u) {
  return compose(u, [](double u0, int) { return std::exp(u0); });
}

inline Taylor log(const Taylor& u) {
  return compose(u, [](double u0, int k) {
    if (!(u0 > 0.0)) throw NonFiniteValue("taylor: log of non-positive value");
    if (k == 0) return std::log(u0);
    double f = 1.0 / u0;
    for (int j = 1; j < k; ++j) f *= -static_cast<double>(j) / u0;
    return f;
  });
}

inline Taylor sin(const Taylor& u) {
  return compose(u, [](double u0, int k) {
    switch (k % 4) {
      case 0: return std::sin(u0);
      case 1: return std::cos(u0);
      case 2: return -std::sin(u0);
      default: return -std::cos(u0);
    }
  });
}

inline Taylor cos(const Taylor& u) {
  return compose(u, [](double u0, int k) {
    switch (k % 4) {
      case 0: return std::cos(u0);
      case 1: return -std::sin(u0);
      case 2: return -std::cos(u0);
      default: return std::sin(u0);
    }
  });
}

inline Taylor sinh(const Taylor& u) {
  return compose(u, [](double u0, int k) { return k % 2 == 0 ? std::sinh(u0) : std::cosh(u0); });
}

inline Taylor cosh(const Taylor& u) {
  return compose(u, [](double u0, int k) { return k % 2 == 0 ? std::cosh(u0) : std::sinh(u0); });
}

inline Taylor tan(const Taylor& u) { return sin(u) / cos(u); }

inline Taylor atan(const Taylor& u) {
  // atan' = 1/(1+u^2); integrate the expansion of the derivative.
  if (u.is_constant()) return Taylor(std::atan(u.value()));
  return compose(u, [](double u0, int k) {
    if (k == 0) return std::atan(u0);
    // derivatives of 1/(1+t^2) through the recurrence on (1+t^2) f' = -2t f
    std::vector<double> d(static_cast<std::size_t>(k), 0.0);
    d[0] = 1.0 / (1.0 + u0 * u0);
    for (int m = 1; m < k; ++m) {
      // (1+t^2) d^m f = -2 m t d^(m-1) f - m(m-1) d^(m-2) f
      double rhs = -2.0 * m * u0 * d[static_cast<std::size_t>(m - 1)];
      if (m >= 2) rhs -= static_cast<double>(m) * (m - 1) * d[static_cast<std::size_t>(m - 2)];
      d[static_cast<std::size_t>(m)] = rhs / (1.0 + u0 * u0);
    }
    return d[static_cast<std::size_t>(k - 1)];
  });
}

}  // namespace finslerlab
