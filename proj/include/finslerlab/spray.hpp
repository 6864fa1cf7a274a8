#pragma once

// Spray geometry: geodesic coefficients, nonlinear connection, Berwald and
// Riemann curvature, flag curvature, geodesics and parallel transport.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/jets.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/tensor.hpp"

namespace finslerlab {

struct SprayData {
  Tensor G;  // G^i
  Tensor N;  // N^i_j, stored [i][j]
};

inline SprayData spray_coefficients(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y, 3);
  return {evaluate(geo.G()), evaluate(geo.N())};
}

inline TensorField berwald_field(const LocalGeometry& geo) {
  const int n = geo.dim();
  TensorField b(n, {Slot::kUpper, Slot::kLower, Slot::kLower, Slot::kLower}, "B");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) b(i, j, k, l) = geo.dy(geo.dN()(i, j, k), l);
  return b;
}

// B^i_jkl, stored [i][j][k][l].
inline Tensor berwald_curvature(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y);
  return evaluate(berwald_field(geo));
}

// R^i_k, stored [i][k].
inline Tensor riemann_curvature(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y, 4);
  return evaluate(geo.riemann());
}

inline double flag_curvature(const LocalGeometry& geo, const Vec& v) {
  const int n = geo.dim();
  const Tensor g = evaluate(geo.g());
  const Tensor r = evaluate(geo.riemann());
  const Vec& y = geo.y();
  auto inner = [&](const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g(i, j) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return s;
  };
  const double yy = inner(y, y), vv = inner(v, v), yv = inner(y, v);
  const double gram = yy * vv - yv * yv;
  if (!(gram > 1e-8 * yy * vv)) throw DegenerateFlag("flag curvature: v is (nearly) parallel to y");
  Vec rv(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) rv[static_cast<std::size_t>(i)] += r(i, k) * v[static_cast<std::size_t>(k)];
  return inner(rv, v) / gram;
}

inline double flag_curvature(const MetricModel& m, const ChartPoint& p, const FiberVector& y, const FiberVector& v) {
  if (v.dim() != m.dim()) throw DomainError("flag curvature: dimension mismatch");
  LocalGeometry geo(m, p.x, y.y, 4);
  return flag_curvature(geo, v.y);
}

// Trace formula K = R^m_m / ((n-1) F^2); the flag curvature itself when the
// metric has scalar flag curvature (always in dimension 2).
inline Taylor scalar_flag_curvature_field(const LocalGeometry& geo) {
  Taylor tr(0.0);
  for (int m = 0; m < geo.dim(); ++m) tr = tr + geo.riemann()(m, m);
  return tr / (geo.F2() * static_cast<double>(geo.dim() - 1));
}

// Dimension-2 identity for the generalized Landsberg tensor:
// Lbar_ijk + F^2/3 (K_.i h_jk + K_.j h_ik + K_.k h_ij + 3 K C_ijk),
// with K_.i = dK/dy^i. Vanishes on every 2-dimensional metric.
inline Tensor scalar_flag_lbar_residual(const LocalGeometry& geo) {
  const int n = geo.dim();
  const Taylor k = scalar_flag_curvature_field(geo);
  Vec kdot(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) kdot[static_cast<std::size_t>(i)] = geo.dy(k, i).value();
  const double kv = k.value();
  const double f2 = geo.F2().value();
  const Tensor h = evaluate(geo.h()), c = evaluate(geo.C()), lbar = evaluate(geo.Lbar());
  Tensor r = Tensor::lower(n, 3, "scalar_flag_residual");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double pattern = kdot[static_cast<std::size_t>(i)] * h(j, l) + kdot[static_cast<std::size_t>(j)] * h(i, l) +
                               kdot[static_cast<std::size_t>(l)] * h(i, j) + 3.0 * kv * c(i, j, l);
        r(i, j, l) = lbar(i, j, l) + f2 / 3.0 * pattern;
      }
  return r;
}

struct GeodesicTrajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> v;
  std::vector<double> speed;  // F(x, v)
  double step = 0.0;
  int order = 4;
  double speed_scale = 1.0;  // factor applied to the initial velocity

  std::size_t size() const { return t.size(); }
};

namespace detail {

inline Vec spray_values(const MetricModel& m, const Vec& x, const Vec& v) {
  LocalGeometry geo(m, x, v, 2, 0.0);
  Vec g(static_cast<std::size_t>(m.dim()));
  for (int i = 0; i < m.dim(); ++i) g[static_cast<std::size_t>(i)] = geo.G()(i).value();
  return g;
}

inline Vec axpy(const Vec& a, double s, const Vec& b) {
  Vec r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
  return r;
}

// State layout: x, v, then any number of transported vectors.
struct FlowState {
  Vec x, v;
  std::vector<Vec> vectors;
};

inline FlowState flow_rhs(const MetricModel& m, const FlowState& s, double last_t) {
  const int n = m.dim();
  if (!m.domain().contains(s.x)) throw ChartExit("geodesic left the chart domain", last_t);
  FlowState d;
  d.x = s.v;
  if (s.vectors.empty()) {
    Vec g = spray_values(m, s.x, s.v);
    d.v.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.v[static_cast<std::size_t>(i)] = -2.0 * g[static_cast<std::size_t>(i)];
    return d;
  }
  LocalGeometry geo(m, s.x, s.v, 3, 0.0);
  d.v.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d.v[static_cast<std::size_t>(i)] = -2.0 * geo.G()(i).value();
  const Tensor h = evaluate(geo.gamma());
  for (const Vec& u : s.vectors) {
    Vec du(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          du[static_cast<std::size_t>(i)] -= h(i, j, k) * u[static_cast<std::size_t>(j)] * s.v[static_cast<std::size_t>(k)];
    d.vectors.push_back(std::move(du));
  }
  return d;
}

inline FlowState flow_step(const FlowState& s, double h, const FlowState& d) {
  FlowState r;
  r.x = axpy(s.x, h, d.x);
  r.v = axpy(s.v, h, d.v);
  for (std::size_t q = 0; q < s.vectors.size(); ++q) r.vectors.push_back(axpy(s.vectors[q], h, d.vectors[q]));
  return r;
}

inline FlowState rk4(const MetricModel& m, const FlowState& s, double h, double t) {
  const FlowState k1 = flow_rhs(m, s, t);
  const FlowState k2 = flow_rhs(m, flow_step(s, 0.5 * h, k1), t);
  const FlowState k3 = flow_rhs(m, flow_step(s, 0.5 * h, k2), t);
  const FlowState k4 = flow_rhs(m, flow_step(s, h, k3), t);
  FlowState r = s;
  auto combine = [h](Vec& out, const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
  };
  combine(r.x, k1.x, k2.x, k3.x, k4.x);
  combine(r.v, k1.v, k2.v, k3.v, k4.v);
  for (std::size_t q = 0; q < r.vectors.size(); ++q)
    combine(r.vectors[q], k1.vectors[q], k2.vectors[q], k3.vectors[q], k4.vectors[q]);
  for (double c : r.x)
    if (!std::isfinite(c)) throw NonFiniteValue("geodesic: non-finite state");
  return r;
}

}  // namespace detail

// Classical RK4 on x' = v, v' = -2 G(x, v). With `unit_speed` the initial
// velocity is rescaled to F = 1 first.
inline GeodesicTrajectory integrate_geodesic(const MetricModel& m, const ChartPoint& x0, const FiberVector& y0,
                                             double duration, int steps, bool unit_speed = true) {
  check_chart_point(x0, &m.domain());
  check_fiber_vector(y0, m.dim());
  if (steps < 1) throw DomainError("geodesic: at least one step required");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw DomainError("geodesic: duration must be positive");
  const double h = duration / steps;
  if (h < 1e-12) throw DomainError("geodesic: step underflow");

  GeodesicTrajectory traj;
  traj.step = h;
  detail::FlowState s{x0.x, y0.y, {}};
  if (unit_speed) {
    traj.speed_scale = 1.0 / m.F(s.x, s.v);
    for (double& c : s.v) c *= traj.speed_scale;
  }
  auto record = [&](double t) {
    traj.t.push_back(t);
    traj.x.push_back(s.x);
    traj.v.push_back(s.v);
    traj.speed.push_back(m.F(s.x, s.v));
  };
  record(0.0);
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    s = detail::rk4(m, s, h, t);
    if (!m.domain().contains(s.x)) throw ChartExit("geodesic left the chart domain", t);
    record((k + 1) * h);
  }
  return traj;
}

struct TransportedFrame {
  std::vector<double> t;
  std::vector<std::vector<Vec>> vectors;  // [time][vector]
};

// Transports vectors along the geodesic through (x0, v0) for signed time
// `duration` with dU^i/dt + H^i_jk U^j v^k = 0 (Cartan horizontal part).
inline TransportedFrame transport_along(const MetricModel& m, const Vec& x0, const Vec& v0, const std::vector<Vec>& u0,
                                        double duration, int steps) {
  if (steps < 1) throw DomainError("transport: at least one step required");
  const double h = duration / steps;
  detail::FlowState s{x0, v0, u0};
  if (s.vectors.empty()) throw DomainError("transport: no vectors given");
  TransportedFrame out;
  out.t.push_back(0.0);
  out.vectors.push_back(s.vectors);
  for (int k = 0; k < steps; ++k) {
    s = detail::rk4(m, s, h, k * h);
    out.t.push_back((k + 1) * h);
    out.vectors.push_back(s.vectors);
  }
  return out;
}

inline TransportedFrame parallel_transport(const MetricModel& m, const GeodesicTrajectory& traj,
                                           const std::vector<Vec>& u0) {
  if (traj.size() < 2) throw DomainError("transport: trajectory too short");
  for (const auto& u : u0)
    if (static_cast<int>(u.size()) != m.dim()) throw DomainError("transport: dimension mismatch");
  return transport_along(m, traj.x.front(), traj.v.front(), u0, traj.t.back(), static_cast<int>(traj.size()) - 1);
}

// Transports vectors given at the end of the trajectory back to its start.
inline std::vector<Vec> reverse_transport(const MetricModel& m, const GeodesicTrajectory& traj,
                                          const std::vector<Vec>& u_end) {
  auto back = transport_along(m, traj.x.back(), traj.v.back(), u_end, -traj.t.back(), static_cast<int>(traj.size()) - 1);
  return back.vectors.back();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |sample - fit|
};

inline LineFit fit_line(const std::vector<double>& t, const std::vector<double>& c) {
  const double n = static_cast<double>(t.size());
  double st = 0, sc = 0, stt = 0, stc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sc += c[i];
    stt += t[i] * t[i];
    stc += t[i] * c[i];
  }
  LineFit f;
  const double den = n * stt - st * st;
  f.slope = den != 0.0 ? (n * stc - st * sc) / den : 0.0;
  f.intercept = (sc - f.slope * st) / n;
  for (std::size_t i = 0; i < t.size(); ++i)
    f.residual = std::max(f.residual, std::abs(c[i] - (f.slope * t[i] + f.intercept)));
  return f;
}

struct CartanSamples {
  std::vector<double> t;
  std::vector<double> c;  // C_{x'(t)}(U, V, W)
  LineFit fit;
  double slope_at_zero = 0.0;  // one-sided five-point difference
};

// `frame` carries the parallel fields (U, V, W) as its first three vectors.
inline CartanSamples cartan_along_geodesic(const MetricModel& m, const GeodesicTrajectory& traj,
                                           const TransportedFrame& frame) {
  const int n = m.dim();
  if (frame.t.size() != traj.size()) throw DomainError("cartan samples: transported frame does not match the trajectory");
  if (frame.vectors.front().size() < 3) throw DomainError("cartan samples: need three transported vectors");
  if (traj.size() < 5) throw DomainError("cartan samples: need at least 5 samples");
  CartanSamples out;
  for (std::size_t q = 0; q < traj.size(); ++q) {
    LocalGeometry geo(m, traj.x[q], traj.v[q], 3, 0.0);
    const Tensor c = evaluate(geo.C());
    const Vec& a = frame.vectors[q][0];
    const Vec& b = frame.vectors[q][1];
    const Vec& d = frame.vectors[q][2];
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          s += c(i, j, k) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(k)];
    out.t.push_back(traj.t[q]);
    out.c.push_back(s);
  }
  out.fit = fit_line(out.t, out.c);
  const double h = traj.step;
  const auto& c = out.c;
  out.slope_at_zero = (-25.0 * c[0] + 48.0 * c[1] - 36.0 * c[2] + 16.0 * c[3] - 3.0 * c[4]) / (12.0 * h);
  return out;
}

}  // namespace finslerlab
