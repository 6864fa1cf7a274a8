#pragma once

// Reference computations for tests. Nothing here touches the Taylor engine:
// metrics are plain C++ lambdas and derivatives are five-point stencils.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;
using MetricFn = std::function<Mat(const Vec&)>;

inline constexpr double kStep = 1e-3;

// d/dx^k of a matrix-valued function.
inline Mat d_mat(const std::function<Mat(const Vec&)>& f, const Vec& x, int k, double h = kStep) {
  auto at = [&](double s) {
    Vec p = x;
    p[static_cast<std::size_t>(k)] += s;
    return f(p);
  };
  const Mat a = at(2 * h), b = at(h), c = at(-h), d = at(-2 * h);
  Mat r = a;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r[i].size(); ++j) r[i][j] = (-a[i][j] + 8 * b[i][j] - 8 * c[i][j] + d[i][j]) / (12 * h);
  return r;
}

inline Mat inverse(const Mat& m) {
  const std::size_t n = m.size();
  Mat a = m, inv(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(inv[c], inv[p]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

// Gamma^i_jk as a flat [i][j][k] array.
inline std::vector<double> christoffel(const MetricFn& a, const Vec& x) {
  const std::size_t n = x.size();
  std::vector<Mat> da;
  for (std::size_t k = 0; k < n; ++k) da.push_back(d_mat(a, x, static_cast<int>(k)));
  const Mat ai = inverse(a(x));
  std::vector<double> g(n * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) s += ai[i][m] * (da[j][m][k] + da[k][m][j] - da[m][j][k]);
        g[(i * n + j) * n + k] = 0.5 * s;
      }
  return g;
}

// G^i = 1/2 Gamma^i_jk y^j y^k
inline Vec spray(const MetricFn& a, const Vec& x, const Vec& y) {
  const std::size_t n = x.size();
  const auto g = christoffel(a, x);
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i] += 0.5 * g[(i * n + j) * n + k] * y[j] * y[k];
  return out;
}

// Sectional curvature of span(y, v) from R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj
// + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj, with the derivatives of
// Gamma taken by a second five-point stencil.
inline double sectional_curvature(const MetricFn& a, const Vec& x, const Vec& y, const Vec& v) {
  const std::size_t n = x.size();
  const auto g = christoffel(a, x);
  auto gi = [&](const std::vector<double>& t, std::size_t i, std::size_t j, std::size_t k) { return t[(i * n + j) * n + k]; };
  std::vector<std::vector<double>> dg;
  const double h = 1e-2;
  for (std::size_t k = 0; k < n; ++k) {
    auto at = [&](double s) {
      Vec p = x;
      p[k] += s;
      return christoffel(a, p);
    };
    const auto p2 = at(2 * h), p1 = at(h), m1 = at(-h), m2 = at(-2 * h);
    std::vector<double> d(g.size());
    for (std::size_t q = 0; q < d.size(); ++q) d[q] = (-p2[q] + 8 * p1[q] - 8 * m1[q] + m2[q]) / (12 * h);
    dg.push_back(d);
  }
  const Mat ax = a(x);
  // num = a_pi R^i_jkl v^p y^j v^k y^l
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double r = gi(dg[k], i, l, j) - gi(dg[l], i, k, j);
          for (std::size_t m = 0; m < n; ++m) r += gi(g, i, k, m) * gi(g, m, l, j) - gi(g, i, l, m) * gi(g, m, k, j);
          // r = R^i_jkl
          for (std::size_t p = 0; p < n; ++p) num += ax[p][i] * r * v[p] * y[j] * v[k] * y[l];
        }
  double yy = 0, vv = 0, yv = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      yy += ax[i][j] * y[i] * y[j];
      vv += ax[i][j] * v[i] * v[j];
      yv += ax[i][j] * y[i] * v[j];
    }
  // num = <R(v, y) y, v>; the unit sphere gives K = +1.
  return num / (yy * vv - yv * yv);
}

}  // namespace oracle
