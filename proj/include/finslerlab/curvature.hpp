#pragma once

// hh-, hv- and vv-curvature of a connection, a finite-difference oracle for
// the curvature operator, and classification by vanishing tensors.
//
// Blocks are stored [section j][output i][k][l] and read off
//   Omega(delta_k, delta_l) d_j   = R_j^i_kl d_i
//   Omega(delta_k, d/dy^l) d_j    = P_j^i_kl d_i
//   Omega(d/dy^k, d/dy^l) d_j     = Q_j^i_kl d_i
// with Omega(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]. P and Q refer to the
// natural fiber directions; against the F-normalized ones they carry the
// factors F and F^2.

#include <cmath>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "finslerlab/connections.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/parallel.hpp"
#include "finslerlab/sampling.hpp"
#include "finslerlab/spray.hpp"

namespace finslerlab {

struct CurvatureFields {
  TensorField R, P, Q;
};

struct CurvatureTriple {
  Tensor R, P, Q;
  std::string frame = "adapted: dx^k, dy^k + N^k_m dx^m";
};

inline TensorField curvature_block_shape(int n, const std::string& tag) {
  return TensorField(n, {Slot::kLower, Slot::kUpper, Slot::kLower, Slot::kLower}, tag);
}

// R^m_kl = delta_k N^m_l - delta_l N^m_k
inline TensorField nonlinear_curvature(const LocalGeometry& geo) {
  const int n = geo.dim();
  TensorField r = TensorField::mixed(n, 2, "Rnl");
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) r(m, k, l) = geo.delta(geo.N()(m, l), k) - geo.delta(geo.N()(m, k), l);
  return r;
}

inline CurvatureFields curvature_fields(const LocalGeometry& geo, const LocalConnection& c) {
  const int n = geo.dim();
  const TensorField rnl = nonlinear_curvature(geo);
  const TensorField& dn = geo.dN();
  std::vector<TensorField> dh, dv, vh, vv;
  for (int k = 0; k < n; ++k) {
    dh.push_back(geo.delta(c.H, k));
    dv.push_back(geo.delta(c.V, k));
    vh.push_back(geo.dy(c.H, k));
    vv.push_back(geo.dy(c.V, k));
  }
  auto sz = [](int i) { return static_cast<std::size_t>(i); };
  CurvatureFields out{curvature_block_shape(n, "R"), curvature_block_shape(n, "P"), curvature_block_shape(n, "Q")};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Taylor r = dh[sz(k)](i, j, l) - dh[sz(l)](i, j, k);
          Taylor p = dv[sz(k)](i, j, l) - vh[sz(l)](i, j, k);
          Taylor q = vv[sz(k)](i, j, l) - vv[sz(l)](i, j, k);
          for (int m = 0; m < n; ++m) {
            r = r + rnl(m, k, l) * c.V(i, j, m);
            p = p - dn(m, k, l) * c.V(i, j, m);
            r = r + c.H(i, m, k) * c.H(m, j, l) - c.H(i, m, l) * c.H(m, j, k);
            p = p + c.H(i, m, k) * c.V(m, j, l) - c.V(i, m, l) * c.H(m, j, k);
            q = q + c.V(i, m, k) * c.V(m, j, l) - c.V(i, m, l) * c.V(m, j, k);
          }
          out.R(j, i, k, l) = r;
          out.P(j, i, k, l) = p;
          out.Q(j, i, k, l) = q;
        }
  return out;
}

inline CurvatureTriple curvature_triple(const FinslerConnection& c, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(c.model(), p.x, y.y);
  auto f = curvature_fields(geo, c.at(geo));
  return {evaluate(f.R), evaluate(f.P), evaluate(f.Q)};
}

// Lowers the output slot: R_{j m kl} = g_{mi} R_j^i_kl.
inline Tensor lower_output(const Tensor& block, const Tensor& g) {
  const int n = block.dim();
  Tensor r = Tensor::lower(n, 4, block.tag());
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += g(m, i) * block(j, i, k, l);
          r(j, m, k, l) = s;
        }
  return r;
}

// One of the adapted frame fields: delta_k (horizontal) or d/dy^k.
struct FrameVector {
  bool vertical = false;
  int index = 0;
};

struct OracleOptions {
  double step = 1e-3;
  int order = 4;  // Taylor order for coefficient values at displaced points
};

namespace detail {

struct PointData {
  Tensor H, V, N;
};

inline PointData connection_values(const FinslerConnection& c, const Vec& x, const Vec& y, int order) {
  LocalGeometry geo(c.model(), x, y, order, 0.0);
  auto lc = c.at(geo);
  return {evaluate(lc.H), evaluate(lc.V), evaluate(geo.N())};
}

// Natural components (a on d/dx, b on d/dy) of a frame field at a point.
inline std::pair<Vec, Vec> frame_components(const FrameVector& e, const Tensor& nl) {
  const int n = nl.dim();
  Vec a(static_cast<std::size_t>(n), 0.0), b(static_cast<std::size_t>(n), 0.0);
  if (e.vertical) {
    b[static_cast<std::size_t>(e.index)] = 1.0;
  } else {
    a[static_cast<std::size_t>(e.index)] = 1.0;
    for (int m = 0; m < n; ++m) b[static_cast<std::size_t>(m)] = -nl(m, e.index);
  }
  return {a, b};
}

// Connection matrix omega(E)^i_j for a natural tangent vector (a, b).
inline std::vector<double> omega(const PointData& d, const Vec& a, const Vec& b) {
  const int n = d.H.dim();
  std::vector<double> w(static_cast<std::size_t>(n * n), 0.0);
  Vec vert = b;
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m) vert[static_cast<std::size_t>(l)] += d.N(l, m) * a[static_cast<std::size_t>(m)];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += d.H(i, j, k) * a[static_cast<std::size_t>(k)] + d.V(i, j, k) * vert[static_cast<std::size_t>(k)];
      w[static_cast<std::size_t>(i * n + j)] = s;
    }
  return w;
}

// Central difference along the natural vector (a, b), one Richardson level.
template <class Fn>
std::vector<double> directional(const Fn& fn, const Vec& x, const Vec& y, const Vec& a, const Vec& b, double h) {
  auto at = [&](double t) {
    Vec xs = x, ys = y;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] += t * a[i];
      ys[i] += t * b[i];
    }
    return fn(xs, ys);
  };
  auto central = [&](double s) {
    auto p = at(s), m = at(-s);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (p[i] - m[i]) / (2.0 * s);
    return p;
  };
  auto d1 = central(h), d2 = central(0.5 * h);
  for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = (4.0 * d2[i] - d1[i]) / 3.0;
  return d1;
}

}  // namespace detail

// Omega(E1, E2) as a matrix [section j][output i], from finite differences of
// the connection matrices along the frame fields and of the frame fields
// themselves for the bracket.
inline Tensor structure_oracle(const FinslerConnection& c, const ChartPoint& p, const FiberVector& y, FrameVector e1,
                               FrameVector e2, const OracleOptions& opt = {}) {
  const MetricModel& m = c.model();
  const int n = m.dim();
  check_chart_point(p, &m.domain());
  check_fiber_vector(y, n);
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (p.x[u] - 2.0 * opt.step <= m.domain().lower[u] || p.x[u] + 2.0 * opt.step >= m.domain().upper[u])
      throw DomainError("structure oracle: stencil leaves the chart domain");
  }
  const auto base = detail::connection_values(c, p.x, y.y, opt.order);
  const auto [a1, b1] = detail::frame_components(e1, base.N);
  const auto [a2, b2] = detail::frame_components(e2, base.N);

  // E(omega(F)): the frame field F is re-evaluated at displaced points.
  auto omega_of_field = [&](FrameVector f) {
    return [&, f](const Vec& xs, const Vec& ys) {
      auto d = detail::connection_values(c, xs, ys, opt.order);
      auto [a, b] = detail::frame_components(f, d.N);
      return detail::omega(d, a, b);
    };
  };
  auto frame_field = [&](FrameVector f) {
    return [&, f](const Vec& xs, const Vec& ys) {
      auto d = detail::connection_values(c, xs, ys, opt.order);
      auto [a, b] = detail::frame_components(f, d.N);
      Vec all = a;
      all.insert(all.end(), b.begin(), b.end());
      return all;
    };
  };
  const auto d12 = detail::directional(omega_of_field(e2), p.x, y.y, a1, b1, opt.step);
  const auto d21 = detail::directional(omega_of_field(e1), p.x, y.y, a2, b2, opt.step);

  // [E1, E2]^A = E1(E2^A) - E2(E1^A)
  const auto f2 = detail::directional(frame_field(e2), p.x, y.y, a1, b1, opt.step);
  const auto f1 = detail::directional(frame_field(e1), p.x, y.y, a2, b2, opt.step);
  Vec ba(static_cast<std::size_t>(n)), bb(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    ba[u] = f2[u] - f1[u];
    bb[u] = f2[u + static_cast<std::size_t>(n)] - f1[u + static_cast<std::size_t>(n)];
  }
  const auto wb = detail::omega(base, ba, bb);
  const auto w1 = detail::omega(base, a1, b1);
  const auto w2 = detail::omega(base, a2, b2);

  Tensor out(n, {Slot::kLower, Slot::kUpper}, "Omega");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto ij = static_cast<std::size_t>(i * n + j);
      double comm = 0.0;
      for (int q = 0; q < n; ++q) {
        comm += w1[static_cast<std::size_t>(i * n + q)] * w2[static_cast<std::size_t>(q * n + j)] -
                w2[static_cast<std::size_t>(i * n + q)] * w1[static_cast<std::size_t>(q * n + j)];
      }
      out(j, i) = d12[ij] - d21[ij] - wb[ij] + comm;
    }
  return out;
}

// ---- classification ----

struct PredicateResult {
  std::string name;
  std::string tensor;
  double max_normalized = 0.0;
  bool holds = true;
  int witness = -1;  // sample index attaining the maximum
  Vec witness_x, witness_y;
};

struct ClassificationReport {
  std::vector<PredicateResult> predicates;
  std::vector<std::string> warnings;
  double tolerance = 1e-7;
  int samples = 0;

  const PredicateResult& at(const std::string& name) const {
    for (const auto& p : predicates)
      if (p.name == name) return p;
    throw Error("classification: unknown predicate " + name);
  }
};

// Homogeneity degree in y of each tested tensor; the max-abs of its entries is
// multiplied by F^-degree so verdicts do not depend on the length of y.
struct PredicateSpec {
  const char* name;
  const char* tensor;
  int degree;
};

inline constexpr PredicateSpec kPredicates[] = {
    {"riemannian", "C", -1},      {"landsberg", "L", 0},        {"weakly_landsberg", "J", 0},
    {"berwald", "B", -1},         {"c_reducible", "M", -1},     {"generalized_landsberg", "Lbar", 1},
};

inline std::vector<double> predicate_values(const LocalGeometry& geo) {
  const double f = geo.F().value();
  const Tensor tensors[] = {evaluate(geo.C()), evaluate(geo.L()),     evaluate(geo.J()),
                            evaluate(berwald_field(geo)), evaluate(geo.M()), evaluate(geo.Lbar())};
  std::vector<double> out;
  for (std::size_t p = 0; p < std::size(kPredicates); ++p)
    out.push_back(max_abs(tensors[p]) * std::pow(f, -kPredicates[p].degree));
  return out;
}

inline ClassificationReport classify_samples(const MetricModel& /*m*/, const std::vector<Sample>& samples,
                                             const std::vector<std::vector<double>>& values, double tol) {
  ClassificationReport rep;
  rep.tolerance = tol;
  rep.samples = static_cast<int>(samples.size());
  for (std::size_t p = 0; p < std::size(kPredicates); ++p) {
    PredicateResult r;
    r.name = kPredicates[p].name;
    r.tensor = kPredicates[p].tensor;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (r.witness < 0 || values[s][p] > r.max_normalized) {
        r.max_normalized = values[s][p];
        r.witness = samples[s].index;
        r.witness_x = samples[s].x;
        r.witness_y = samples[s].y;
      }
    }
    r.holds = r.max_normalized <= tol;
    rep.predicates.push_back(std::move(r));
  }
  auto holds = [&](const char* n) { return rep.at(n).holds; };
  auto imply = [&](const char* a, const char* b) {
    if (holds(a) && !holds(b)) rep.warnings.push_back(std::string(a) + " holds but " + b + " does not");
  };
  for (const auto& p : kPredicates)
    if (std::string(p.name) != "riemannian") imply("riemannian", p.name);
  imply("berwald", "landsberg");
  imply("landsberg", "weakly_landsberg");
  imply("landsberg", "generalized_landsberg");
  return rep;
}

inline ClassificationReport classify_metric(const MetricModel& m, const SamplePlan& plan, double tol = 1e-7) {
  if (plan.count < 20) throw ConfigError("classification needs at least 20 samples");
  auto samples = draw_samples(m.domain(), plan);
  auto values = parallel_map(static_cast<int>(samples.size()), [&](int i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    LocalGeometry geo(m, s.x, s.y, LocalGeometry::kFullOrder, plan.fiber_floor);
    return predicate_values(geo);
  });
  return classify_samples(m, samples, values, tol);
}

}  // namespace finslerlab
