#pragma once

// Finsler connections in the adapted frame (dx^k, dy^k + N^k_m dx^m).
//
// A connection is the pair of coefficient fields
//   nabla_{delta_k} d_j = H^i_jk d_i,   nabla_{d/dy^k} d_j = V^i_jk d_i,
// both stored [i][j][k], over the shared nonlinear connection N of the spray.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/spray.hpp"
#include "finslerlab/tensor.hpp"

namespace finslerlab {

enum class ConnectionKind { kCartan, kChern, kBerwald, kHashiguchi, kShen };

inline std::string to_string(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::kCartan: return "cartan";
    case ConnectionKind::kChern: return "chern";
    case ConnectionKind::kBerwald: return "berwald";
    case ConnectionKind::kHashiguchi: return "hashiguchi";
    case ConnectionKind::kShen: return "shen";
  }
  return "unknown";
}

inline ConnectionKind parse_connection(const std::string& s) {
  for (auto k : {ConnectionKind::kCartan, ConnectionKind::kChern, ConnectionKind::kBerwald, ConnectionKind::kHashiguchi,
                 ConnectionKind::kShen})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown connection '" + s + "'");
}

struct LocalConnection {
  TensorField H;
  TensorField V;
};

class FinslerConnection {
 public:
  using Evaluator = std::function<LocalConnection(const LocalGeometry&)>;

  FinslerConnection(MetricModel model, std::string name, Evaluator eval, bool homogeneous = true)
      : model_(std::move(model)), name_(std::move(name)), eval_(std::move(eval)), homogeneous_(homogeneous) {}

  const MetricModel& model() const { return model_; }
  const std::string& name() const { return name_; }
  bool homogeneous() const { return homogeneous_; }

  LocalConnection at(const LocalGeometry& geo) const { return eval_(geo); }

  // (H, V) values at a point.
  std::pair<Tensor, Tensor> coefficients(const ChartPoint& p, const FiberVector& y) const {
    LocalGeometry geo(model_, p.x, y.y);
    auto c = at(geo);
    return {evaluate(c.H), evaluate(c.V)};
  }

 private:
  MetricModel model_;
  std::string name_;
  Evaluator eval_;
  bool homogeneous_;
};

// Symmetric horizontal coefficients with prescribed horizontal metric defect
// D_ijk = delta_k g_ij - g_mj H^m_ik - g_im H^m_jk.
inline TensorField koszul_coefficients(const LocalGeometry& geo, const TensorField* defect) {
  const int n = geo.dim();
  std::vector<TensorField> dg;
  for (int k = 0; k < n; ++k) dg.push_back(geo.delta(geo.g(), k));
  auto e = [&](int i, int j, int k) {
    Taylor v = dg[static_cast<std::size_t>(k)](i, j);
    if (defect) v = v - (*defect)(i, j, k);
    return v;
  };
  TensorField low = TensorField::lower(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) low(i, j, k) = 0.5 * (e(i, j, k) + e(i, k, j) - e(j, k, i));
  return geo.raise_first(low);
}

inline TensorField zero_coefficients(int n) { return TensorField::mixed(n, 2); }

namespace detail {

inline double max_abs_diff_fields(const TensorField& a, const TensorField& b) {
  return max_abs_diff(evaluate(a), evaluate(b));
}

// Fixed point used to pin conventions when a connection is built.
inline std::pair<Vec, Vec> validation_point(const MetricModel& m) {
  Vec x = m.domain().center();
  Vec y(static_cast<std::size_t>(m.dim()));
  for (int i = 0; i < m.dim(); ++i) y[static_cast<std::size_t>(i)] = 1.0 / (1.0 + i) - 0.15 * i;
  return {x, y};
}

}  // namespace detail

inline FinslerConnection build_connection(const MetricModel& m, ConnectionKind kind) {
  const std::string name = to_string(kind);
  switch (kind) {
    case ConnectionKind::kCartan:
      return FinslerConnection(m, name, [](const LocalGeometry& g) { return LocalConnection{g.gamma(), g.C_up()}; });
    case ConnectionKind::kChern:
      return FinslerConnection(m, name,
                               [](const LocalGeometry& g) { return LocalConnection{g.gamma(), zero_coefficients(g.dim())}; });
    case ConnectionKind::kBerwald: {
      // dN/dy must equal the Chern horizontal part shifted by the Landsberg
      // tensor; a mismatch means the sign conventions drifted.
      auto [x, y] = detail::validation_point(m);
      LocalGeometry geo(m, x, y);
      const double scale = std::max(1.0, max_abs(evaluate(geo.dN())));
      if (detail::max_abs_diff_fields(geo.dN(), geo.gamma() + geo.L_up()) > 1e-7 * scale)
        throw ConventionMismatch("berwald: dN/dy disagrees with the L-shifted Chern coefficients");
      return FinslerConnection(m, name,
                               [](const LocalGeometry& g) { return LocalConnection{g.dN(), zero_coefficients(g.dim())}; });
    }
    case ConnectionKind::kHashiguchi:
      return FinslerConnection(m, name, [](const LocalGeometry& g) { return LocalConnection{g.dN(), g.C_up()}; });
    case ConnectionKind::kShen:
      return FinslerConnection(m, name, [](const LocalGeometry& g) {
        TensorField defect = g.A().scaled(Taylor(2.0));
        return LocalConnection{koszul_coefficients(g, &defect), zero_coefficients(g.dim())};
      });
  }
  throw Error("build_connection: unknown kind");
}

struct TorsionComponents {
  Tensor S;  // S^i_kl = H^i_kl - H^i_lk
  Tensor T;  // T^i_kl = V^i_kl
};

inline TensorField hh_torsion(const LocalConnection& c) {
  TensorField s = c.H;
  s.set_tag("S");
  const int n = c.H.dim();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) s(i, k, l) = c.H(i, k, l) - c.H(i, l, k);
  return s;
}

inline TorsionComponents torsion_components(const FinslerConnection& c, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(c.model(), p.x, y.y);
  auto lc = c.at(geo);
  return {evaluate(hh_torsion(lc)), evaluate(lc.V)};
}

namespace detail {

// Adds the connection terms of one leg (coefficients W^i_jk, direction k).
inline TensorField add_connection_terms(TensorField r, const TensorField& t, const TensorField& w, int k) {
  const int n = t.dim();
  const auto& slots = t.slots();
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    auto idx = t.unflatten(flat);
    Taylor acc = r[flat];
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const int a = idx[s];
      auto j = idx;
      for (int p = 0; p < n; ++p) {
        j[s] = p;
        if (slots[s] == Slot::kUpper) {
          acc = acc + w(a, p, k) * t[t.flatten(j)];
        } else {
          acc = acc - w(p, a, k) * t[t.flatten(j)];
        }
      }
    }
    r[flat] = acc;
  }
  return r;
}

inline TensorField append_slot(const TensorField& t, const std::vector<TensorField>& parts, const std::string& tag) {
  auto slots = t.slots();
  slots.push_back(Slot::kLower);
  TensorField r(t.dim(), slots, tag);
  const std::size_t n = static_cast<std::size_t>(t.dim());
  for (std::size_t flat = 0; flat < t.size(); ++flat)
    for (std::size_t k = 0; k < n; ++k) r[flat * n + k] = parts[k][flat];
  return r;
}

}  // namespace detail

// X_{..|k}: horizontal covariant derivative, new lower slot appended last.
inline TensorField h_cov_deriv(const LocalGeometry& geo, const LocalConnection& c, const TensorField& t) {
  std::vector<TensorField> parts;
  for (int k = 0; k < geo.dim(); ++k) parts.push_back(detail::add_connection_terms(geo.delta(t, k), t, c.H, k));
  return detail::append_slot(t, parts, t.tag() + "|");
}

// Vertical covariant derivative along d/dy^k.
inline TensorField v_cov_deriv_natural(const LocalGeometry& geo, const LocalConnection& c, const TensorField& t) {
  std::vector<TensorField> parts;
  for (int k = 0; k < geo.dim(); ++k) parts.push_back(detail::add_connection_terms(geo.dy(t, k), t, c.V, k));
  return detail::append_slot(t, parts, t.tag() + ";");
}

// Vertical covariant derivative in the F-normalized fiber direction: F times
// the natural one.
inline TensorField v_cov_deriv(const LocalGeometry& geo, const LocalConnection& c, const TensorField& t) {
  TensorField r = v_cov_deriv_natural(geo, c, t);
  r = r.scaled(geo.F());
  r.set_tag(t.tag() + ".");
  return r;
}

using FieldFn = std::function<TensorField(const LocalGeometry&)>;

inline Tensor h_cov_deriv(const FinslerConnection& c, const FieldFn& field, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(c.model(), p.x, y.y);
  return evaluate(h_cov_deriv(geo, c.at(geo), field(geo)));
}

inline Tensor v_cov_deriv(const FinslerConnection& c, const FieldFn& field, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(c.model(), p.x, y.y);
  return evaluate(v_cov_deriv(geo, c.at(geo), field(geo)));
}

// y as a vector field on the slit tangent bundle.
inline TensorField y_vector_field(const LocalGeometry& geo) {
  TensorField y(geo.dim(), {Slot::kUpper}, "y");
  for (int i = 0; i < geo.dim(); ++i) y(i) = geo.y_field()[static_cast<std::size_t>(i)];
  return y;
}

struct LandsbergSuite {
  Tensor L;
  Tensor J;
  Tensor Lbar;
};

inline LandsbergSuite landsberg_suite(const MetricModel& m, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(m, p.x, y.y);
  return {evaluate(geo.L()), evaluate(geo.J()), evaluate(geo.Lbar())};
}

// Residual of L_ijk = (h_ij J_k + h_jk J_i + h_ki J_j) / (n + 1), the form the
// Landsberg tensor takes on C-reducible (Randers) metrics.
inline Tensor mean_landsberg_residual(const LocalGeometry& geo) {
  const int n = geo.dim();
  const Tensor l = evaluate(geo.L()), h = evaluate(geo.h()), j = evaluate(geo.J());
  Tensor r = Tensor::lower(n, 3, "Lres");
  const double w = 1.0 / (n + 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) r(a, b, c) = l(a, b, c) - w * (h(a, b) * j(c) + h(b, c) * j(a) + h(c, a) * j(b));
  return r;
}

struct CompatibilityDefect {
  Tensor Dh;  // g_ij|k
  Tensor Dv;  // g_ij.k, F-normalized fiber direction
};

inline std::pair<TensorField, TensorField> compatibility_defect_fields(const LocalGeometry& geo, const LocalConnection& c) {
  return {h_cov_deriv(geo, c, geo.g()), v_cov_deriv(geo, c, geo.g())};
}

inline CompatibilityDefect compatibility_defect(const FinslerConnection& c, const ChartPoint& p, const FiberVector& y) {
  LocalGeometry geo(c.model(), p.x, y.y);
  auto [dh, dv] = compatibility_defect_fields(geo, c.at(geo));
  return {evaluate(dh), evaluate(dv)};
}

}  // namespace finslerlab
