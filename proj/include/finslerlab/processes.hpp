#pragma once

// Connection processes and the curvature changes they induce.
//
// Each process is an affine shift of one leg of the connection:
//   matsumoto_c  V -> V - C
//   matsumoto_l  H -> H + L
//   shen_c       H -> H - F C
//   shen_l       V -> V - L / F
// (natural fiber directions; the F factors come from the F-normalized
// vertical coframe). The nonlinear connection is never changed.
//
// Predicted curvature changes for a shift X of H (covariant derivatives and
// torsion S of the base connection, ';' the natural vertical derivative):
//   dR_j^i_kl = X^i_jl|k - X^i_jk|l - X^i_jm S^m_kl + [X_k, X_l]^i_j
//   dP_j^i_kl = -X^i_jk;l - X^i_jm V^m_kl
//   dQ        = 0
// and for a shift Y of V (Rnl the curvature of N, dN = dN^m_k/dy^l):
//   dR_j^i_kl = Y^i_jm Rnl^m_kl
//   dP_j^i_kl = Y^i_jl|k + Y^i_jm (H^m_lk - dN^m_kl)
//   dQ_j^i_kl = Y^i_jl;k - Y^i_jk;l + Y^i_jm (V^m_lk - V^m_kl) + [Y_k, Y_l]^i_j

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/connections.hpp"
#include "finslerlab/curvature.hpp"
#include "finslerlab/parallel.hpp"
#include "finslerlab/sampling.hpp"

namespace finslerlab {

enum class ProcessKind { kMatsumotoC, kMatsumotoL, kShenC, kShenL };

inline std::string to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::kMatsumotoC: return "matsumoto_c";
    case ProcessKind::kMatsumotoL: return "matsumoto_l";
    case ProcessKind::kShenC: return "shen_c";
    case ProcessKind::kShenL: return "shen_l";
  }
  return "unknown";
}

inline ProcessKind parse_process(const std::string& s) {
  for (auto k : {ProcessKind::kMatsumotoC, ProcessKind::kMatsumotoL, ProcessKind::kShenC, ProcessKind::kShenL})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown process '" + s + "'");
}

enum class Leg { kHorizontal, kVertical };

struct Shift {
  Leg leg = Leg::kHorizontal;
  std::string name;
  std::function<TensorField(const LocalGeometry&)> generator;  // mixed [i][j][k]
  bool homogeneous = true;
};

inline Shift process_shift(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::kMatsumotoC:
      return {Leg::kVertical, "matsumoto_c", [](const LocalGeometry& g) { return g.C_up().scaled(Taylor(-1.0)); }};
    case ProcessKind::kMatsumotoL:
      return {Leg::kHorizontal, "matsumoto_l", [](const LocalGeometry& g) { return g.L_up(); }};
    case ProcessKind::kShenC:
      return {Leg::kHorizontal, "shen_c", [](const LocalGeometry& g) { return g.A_up().scaled(Taylor(-1.0)); }};
    case ProcessKind::kShenL:
      return {Leg::kVertical, "shen_l", [](const LocalGeometry& g) { return g.L_up().scaled(-1.0 / g.F()); }};
  }
  throw Error("process: unknown kind");
}

inline FinslerConnection apply_shift(const FinslerConnection& c, const Shift& s) {
  FinslerConnection base = c;
  auto eval = [base, s](const LocalGeometry& geo) {
    LocalConnection lc = base.at(geo);
    if (s.leg == Leg::kHorizontal) {
      lc.H += s.generator(geo);
    } else {
      lc.V += s.generator(geo);
    }
    return lc;
  };
  return FinslerConnection(c.model(), s.name + "(" + c.name() + ")", eval, c.homogeneous() && s.homogeneous);
}

inline FinslerConnection apply_process(const FinslerConnection& c, ProcessKind kind) {
  return apply_shift(c, process_shift(kind));
}

// ---- predicted curvature changes ----

inline CurvatureFields predicted_delta(const LocalGeometry& geo, const LocalConnection& base, const Shift& s) {
  const int n = geo.dim();
  const TensorField x = s.generator(geo);
  CurvatureFields d{curvature_block_shape(n, "dR"), curvature_block_shape(n, "dP"), curvature_block_shape(n, "dQ")};
  for (auto* t : {&d.R, &d.P, &d.Q})
    for (auto& v : t->data()) v = Taylor(0.0);
  if (s.leg == Leg::kHorizontal) {
    const TensorField xh = h_cov_deriv(geo, base, x);           // [i][j][l][k]
    const TensorField xv = v_cov_deriv_natural(geo, base, x);   // [i][j][k][l]
    const TensorField tors = hh_torsion(base);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            Taylor r = xh(i, j, l, k) - xh(i, j, k, l);
            Taylor p = -xv(i, j, k, l);
            for (int m = 0; m < n; ++m) {
              r = r - x(i, j, m) * tors(m, k, l) + x(i, m, k) * x(m, j, l) - x(i, m, l) * x(m, j, k);
              p = p - x(i, j, m) * base.V(m, k, l);
            }
            d.R(j, i, k, l) = r;
            d.P(j, i, k, l) = p;
          }
    return d;
  }
  const TensorField yh = h_cov_deriv(geo, base, x);
  const TensorField yv = v_cov_deriv_natural(geo, base, x);
  const TensorField rnl = nonlinear_curvature(geo);
  const TensorField& dn = geo.dN();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Taylor r(0.0);
          Taylor p = yh(i, j, l, k);
          Taylor q = yv(i, j, l, k) - yv(i, j, k, l);
          for (int m = 0; m < n; ++m) {
            r = r + x(i, j, m) * rnl(m, k, l);
            p = p + x(i, j, m) * (base.H(m, l, k) - dn(m, k, l));
            q = q + x(i, j, m) * (base.V(m, l, k) - base.V(m, k, l)) + x(i, m, k) * x(m, j, l) - x(i, m, l) * x(m, j, k);
          }
          d.R(j, i, k, l) = r;
          d.P(j, i, k, l) = p;
          d.Q(j, i, k, l) = q;
        }
  return d;
}

// ---- structure identities for metric-defective connections ----

// Symmetrized lowered blocks R_ijkl + R_jikl (section i, output j lowered)
// against the metric defects: with D^h = g_ij|k and natural D^v = g_ij;k,
//   R_ijkl + R_jikl = D^h_ijk|l - D^h_ijl|k + D^h_ijm S^m_kl - Rnl^m_kl D^v_ijm
//   P_ijkl + P_jikl = D^h_ijk;l - D^v_ijl|k + D^h_ijm V^m_kl - D^v_ijm y^a P_a^m_kl
struct DefectIdentity {
  double residual_R = 0.0;
  double residual_P = 0.0;
  double scale = 0.0;
};

inline DefectIdentity metric_defect_identity(const LocalGeometry& geo, const LocalConnection& c) {
  const int n = geo.dim();
  const CurvatureFields cf = curvature_fields(geo, c);
  const Tensor g = evaluate(geo.g());
  const Tensor rl = lower_output(evaluate(cf.R), g), pl = lower_output(evaluate(cf.P), g);
  const TensorField dh = h_cov_deriv(geo, c, geo.g());
  const TensorField dv = v_cov_deriv_natural(geo, c, geo.g());
  const Tensor dhh = evaluate(h_cov_deriv(geo, c, dh)), dhv = evaluate(v_cov_deriv_natural(geo, c, dh));
  const Tensor dvh = evaluate(h_cov_deriv(geo, c, dv));
  const Tensor dhv0 = evaluate(dh), dvv0 = evaluate(dv);
  const Tensor s = evaluate(hh_torsion(c)), v = evaluate(c.V), rnl = evaluate(nonlinear_curvature(geo));
  const Tensor p = evaluate(cf.P);
  DefectIdentity out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double r = dhh(i, j, k, l) - dhh(i, j, l, k);
          double q = dhv(i, j, k, l) - dvh(i, j, l, k);
          for (int m = 0; m < n; ++m) {
            r += dhv0(i, j, m) * s(m, k, l) - rnl(m, k, l) * dvv0(i, j, m);
            double yp = 0.0;
            for (int a = 0; a < n; ++a) yp += geo.y()[static_cast<std::size_t>(a)] * p(a, m, k, l);
            q += dhv0(i, j, m) * v(m, k, l) - dvv0(i, j, m) * yp;
          }
          out.residual_R = std::max(out.residual_R, std::abs(rl(i, j, k, l) + rl(j, i, k, l) - r));
          out.residual_P = std::max(out.residual_P, std::abs(pl(i, j, k, l) + pl(j, i, k, l) - q));
          out.scale = std::max({out.scale, std::abs(rl(i, j, k, l)), std::abs(pl(i, j, k, l))});
        }
  return out;
}

// Identities of the C-process with horizontal shift F C applied to the
// Cartan connection (connection c below), in the F-normalized frame where
// P = F P_natural and A = F C:
//   R_ijkl + R_jikl = 2 (A_ijk|l - A_ijl|k)
//   P_ijkl + P_jikl = 2 (A_ijk.l + A_ijm A^m_kl)
//   Q_ijkl + Q_jikl = 0
// `residual_P_alt` measures the variant with -A_ijm A^m_kl.
struct ShenCartanIdentities {
  double residual_R = 0.0;
  double residual_P = 0.0;
  double residual_P_alt = 0.0;
  double residual_Q = 0.0;
};

inline ShenCartanIdentities shen_cartan_identities(const LocalGeometry& geo, const LocalConnection& c) {
  const int n = geo.dim();
  const CurvatureFields cf = curvature_fields(geo, c);
  const Tensor g = evaluate(geo.g());
  const double f = geo.F().value();
  const Tensor rl = lower_output(evaluate(cf.R), g);
  const Tensor pl = lower_output(evaluate(cf.P).scaled(f), g);
  const Tensor ql = lower_output(evaluate(cf.Q).scaled(f * f), g);
  const Tensor ah = evaluate(h_cov_deriv(geo, c, geo.A()));
  const Tensor av = evaluate(v_cov_deriv(geo, c, geo.A()));
  const Tensor a = evaluate(geo.A()), aup = evaluate(geo.A_up());
  ShenCartanIdentities out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double aa = 0.0;
          for (int m = 0; m < n; ++m) aa += a(i, j, m) * aup(m, k, l);
          const double psym = pl(i, j, k, l) + pl(j, i, k, l);
          out.residual_R = std::max(out.residual_R,
                                    std::abs(rl(i, j, k, l) + rl(j, i, k, l) - 2.0 * (ah(i, j, k, l) - ah(i, j, l, k))));
          out.residual_P = std::max(out.residual_P, std::abs(psym - 2.0 * (av(i, j, k, l) + aa)));
          out.residual_P_alt = std::max(out.residual_P_alt, std::abs(psym - 2.0 * (av(i, j, k, l) - aa)));
          out.residual_Q = std::max(out.residual_Q, std::abs(ql(i, j, k, l) + ql(j, i, k, l)));
        }
  return out;
}

// hv-curvature of the C-process (horizontal shift F C) applied to the
// Berwald connection, contracted with l = y/F in the section slot:
// P_njkl = -A_jkl. Returns the max residual.
inline double shen_berwald_residual(const LocalGeometry& geo, const LocalConnection& c) {
  const int n = geo.dim();
  const CurvatureFields cf = curvature_fields(geo, c);
  const Tensor g = evaluate(geo.g());
  const double f = geo.F().value();
  const Tensor pl = lower_output(evaluate(cf.P).scaled(f), g);
  const Tensor a = evaluate(geo.A());
  double worst = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += geo.y()[static_cast<std::size_t>(i)] / f * pl(i, j, k, l);
        worst = std::max(worst, std::abs(s + a(j, k, l)));
      }
  return worst;
}

// ---- verification driver ----

struct DeltaSample {
  int index = 0;
  Vec x, y;
  double residual_R = 0.0, residual_P = 0.0, residual_Q = 0.0;  // computed vs predicted change
  double delta_R = 0.0, delta_P = 0.0, delta_Q = 0.0;           // size of the change
  double norm_C = 0.0, norm_L = 0.0;                             // F-normalized max-abs
  double norm_T = 0.0;                                           // hv-torsion of the result
  std::vector<std::pair<std::string, double>> structure;        // named structure residuals
};

struct Consequence {
  std::string name;
  bool pass = true;
  double value = 0.0;  // governing max residual or magnitude
  std::string detail;
  int witness = -1;
};

struct DeltaReport {
  std::string process;
  std::string base;
  std::vector<DeltaSample> samples;
  double max_residual_R = 0.0, max_residual_P = 0.0, max_residual_Q = 0.0;
  double max_delta_R = 0.0, max_delta_P = 0.0, max_delta_Q = 0.0;
  std::vector<Consequence> consequences;
  bool expected_hv_change = false;  // the theory predicts dP != 0 here
  bool pass = true;
};

struct VerifyTolerances {
  double identity = 1e-8;   // predicted vs computed change, relative to max(1, scale)
  double zero = 1e-8;       // "vanishes" threshold for theorem consequences
  double structure = 1e-5;  // metric-defect structure identities
};

inline DeltaSample verify_sample(const MetricModel& m, ConnectionKind base_kind, ProcessKind kind, const Sample& s) {
  const FinslerConnection base = build_connection(m, base_kind);
  const Shift shift = process_shift(kind);
  LocalGeometry geo(m, s.x, s.y);
  const LocalConnection lb = base.at(geo);
  LocalConnection lp = lb;
  (shift.leg == Leg::kHorizontal ? lp.H : lp.V) += shift.generator(geo);

  const CurvatureFields cb = curvature_fields(geo, lb), cp = curvature_fields(geo, lp);
  const CurvatureFields pred = predicted_delta(geo, lb, shift);
  DeltaSample out;
  out.index = s.index;
  out.x = s.x;
  out.y = s.y;
  auto compare = [](const TensorField& a, const TensorField& b, const TensorField& p, double& delta, double& residual) {
    const Tensor d = evaluate(a) - evaluate(b);
    delta = max_abs(d);
    residual = max_abs_diff(d, evaluate(p)) / std::max(1.0, delta);
  };
  compare(cp.R, cb.R, pred.R, out.delta_R, out.residual_R);
  compare(cp.P, cb.P, pred.P, out.delta_P, out.residual_P);
  compare(cp.Q, cb.Q, pred.Q, out.delta_Q, out.residual_Q);
  const double f = geo.F().value();
  out.norm_C = f * max_abs(evaluate(geo.C()));
  out.norm_L = max_abs(evaluate(geo.L()));
  out.norm_T = f * max_abs(evaluate(lp.V));

  if (kind == ProcessKind::kShenC && base_kind == ConnectionKind::kCartan) {
    auto id = shen_cartan_identities(geo, lp);
    out.structure.emplace_back("hh_symmetrized", id.residual_R);
    out.structure.emplace_back("hv_symmetrized", id.residual_P);
    out.structure.emplace_back("hv_symmetrized_minus_AA", id.residual_P_alt);
    out.structure.emplace_back("vv_symmetrized", id.residual_Q);
  }
  if (kind == ProcessKind::kShenC && base_kind == ConnectionKind::kBerwald)
    out.structure.emplace_back("hv_along_l", shen_berwald_residual(geo, lp));
  auto defect = metric_defect_identity(geo, lp);
  out.structure.emplace_back("defect_hh", defect.residual_R / std::max(1.0, defect.scale));
  out.structure.emplace_back("defect_hv", defect.residual_P / std::max(1.0, defect.scale));
  return out;
}

inline DeltaReport verify_process_identities(const MetricModel& m, ConnectionKind base_kind, ProcessKind kind,
                                             const std::vector<Sample>& samples, const VerifyTolerances& tol = {}) {
  DeltaReport rep;
  rep.process = to_string(kind);
  rep.base = to_string(base_kind);
  build_connection(m, base_kind);  // surfaces convention errors before the fan-out
  rep.samples = parallel_map(static_cast<int>(samples.size()),
                             [&](int i) { return verify_sample(m, base_kind, kind, samples[static_cast<std::size_t>(i)]); });

  for (const auto& s : rep.samples) {
    rep.max_residual_R = std::max(rep.max_residual_R, s.residual_R);
    rep.max_residual_P = std::max(rep.max_residual_P, s.residual_P);
    rep.max_residual_Q = std::max(rep.max_residual_Q, s.residual_Q);
    rep.max_delta_R = std::max(rep.max_delta_R, s.delta_R);
    rep.max_delta_P = std::max(rep.max_delta_P, s.delta_P);
    rep.max_delta_Q = std::max(rep.max_delta_Q, s.delta_Q);
  }
  auto worst = [&](auto get) {
    Consequence c;
    for (const auto& s : rep.samples) {
      const double v = get(s);
      if (c.witness < 0 || v > c.value) {
        c.value = v;
        c.witness = s.index;
      }
    }
    return c;
  };

  {
    Consequence c = worst([](const DeltaSample& s) { return std::max({s.residual_R, s.residual_P, s.residual_Q}); });
    c.name = "predicted_delta";
    c.pass = c.value < tol.identity;
    c.detail = "computed curvature change vs predicted change (hh, hv, vv)";
    rep.consequences.push_back(c);
  }
  const bool v_unchanged = process_shift(kind).leg == Leg::kHorizontal;
  if (v_unchanged) {
    Consequence c = worst([](const DeltaSample& s) { return s.delta_Q; });
    c.name = "vv_invariance";
    c.pass = c.value < tol.zero;
    c.detail = "vv-curvature unchanged";
    rep.consequences.push_back(c);
  }
  auto iff = [&](const std::string& name, const std::string& detail, auto shift_norm) {
    Consequence c;
    c.name = name;
    c.detail = detail;
    for (const auto& s : rep.samples) {
      const bool dp_zero = s.delta_P < tol.zero;
      const bool shift_zero = shift_norm(s) < tol.zero;
      if (dp_zero != shift_zero && c.pass) {
        c.pass = false;
        c.witness = s.index;
        c.value = s.delta_P;
      }
      if (!shift_zero) rep.expected_hv_change = true;
    }
    if (c.pass) c.value = rep.max_delta_P;
    rep.consequences.push_back(c);
  };
  if (kind == ProcessKind::kMatsumotoL)
    iff("hv_iff_landsberg", "hv-curvature unchanged exactly where L = 0", [](const DeltaSample& s) { return s.norm_L; });
  if (kind == ProcessKind::kShenC)
    iff("hv_iff_riemannian", "hv-curvature unchanged exactly where C = 0", [](const DeltaSample& s) { return s.norm_C; });
  if (kind == ProcessKind::kShenL && (base_kind == ConnectionKind::kChern || base_kind == ConnectionKind::kBerwald)) {
    Consequence c;
    c.name = "torsion_iff_landsberg";
    c.detail = "hv-torsion of the result vanishes exactly where L = 0";
    for (const auto& s : rep.samples) {
      if ((s.norm_T < tol.zero) != (s.norm_L < tol.zero) && c.pass) {
        c.pass = false;
        c.witness = s.index;
      }
      c.value = std::max(c.value, s.norm_T);
    }
    rep.consequences.push_back(c);
  }
  // Structure identities; the "minus_AA" variant is informational.
  std::vector<std::string> names;
  if (!rep.samples.empty())
    for (const auto& [name, v] : rep.samples.front().structure) names.push_back(name);
  for (std::size_t q = 0; q < names.size(); ++q) {
    Consequence c = worst([q](const DeltaSample& s) { return s.structure[q].second; });
    c.name = names[q];
    c.detail = "structure identity residual";
    c.pass = names[q] == "hv_symmetrized_minus_AA" ? true : c.value < tol.structure;
    rep.consequences.push_back(c);
  }
  for (const auto& c : rep.consequences) rep.pass = rep.pass && c.pass;
  return rep;
}

// ---- commuting diagram ----

struct DiagramEdge {
  std::string lhs, rhs;
  double residual = 0.0;  // max over samples of max |H - H'|, |V - V'|
};

// The pinned equalities between processed and named connections.
inline std::vector<DiagramEdge> diagram_commutation(const MetricModel& m, const std::vector<Sample>& samples) {
  using CK = ConnectionKind;
  using PK = ProcessKind;
  struct Path {
    CK base;
    std::vector<PK> steps;
  };
  const std::vector<std::pair<Path, Path>> edges = {
      {{CK::kCartan, {PK::kMatsumotoC}}, {CK::kChern, {}}},
      {{CK::kCartan, {PK::kMatsumotoL}}, {CK::kHashiguchi, {}}},
      {{CK::kChern, {PK::kMatsumotoL}}, {CK::kBerwald, {}}},
      {{CK::kHashiguchi, {PK::kMatsumotoC}}, {CK::kBerwald, {}}},
      {{CK::kChern, {PK::kShenC}}, {CK::kShen, {}}},
      {{CK::kCartan, {PK::kMatsumotoC, PK::kMatsumotoL}}, {CK::kCartan, {PK::kMatsumotoL, PK::kMatsumotoC}}},
  };
  auto realize = [&](const Path& p) {
    FinslerConnection c = build_connection(m, p.base);
    for (auto k : p.steps) c = apply_process(c, k);
    return c;
  };
  std::vector<DiagramEdge> out;
  for (const auto& [a, b] : edges) {
    const FinslerConnection ca = realize(a), cb = realize(b);
    auto per = parallel_map(static_cast<int>(samples.size()), [&](int i) {
      const auto& s = samples[static_cast<std::size_t>(i)];
      LocalGeometry geo(m, s.x, s.y);
      const LocalConnection la = ca.at(geo), lb = cb.at(geo);
      return std::max(max_abs_diff(evaluate(la.H), evaluate(lb.H)), max_abs_diff(evaluate(la.V), evaluate(lb.V)));
    });
    DiagramEdge e{ca.name(), cb.name(), 0.0};
    for (double v : per) e.residual = std::max(e.residual, v);
    out.push_back(e);
  }
  return out;
}

// ---- symmetric / antisymmetric split ----

struct QSplit {
  Tensor Q;          // Q_ij = L_ijl|k - L_ijk|l + L_isk L^s_jl - L_isl L^s_jk
  Tensor symmetric;  // (Q_ij + Q_ji) / 2
  Tensor antisymmetric;
  double residual_symmetric = 0.0;      // vs L_jil|k - L_jik|l
  double residual_antisymmetric = 0.0;  // vs L_isk L^s_jl - L_isl L^s_jk
};

inline QSplit qsplit_check(const MetricModel& m, const ChartPoint& p, const FiberVector& y, int k, int l) {
  const int n = m.dim();
  if (k < 0 || l < 0 || k >= n || l >= n) throw DomainError("qsplit: index out of range");
  LocalGeometry geo(m, p.x, y.y);
  const LocalConnection cartan = build_connection(m, ConnectionKind::kCartan).at(geo);
  const Tensor lh = evaluate(h_cov_deriv(geo, cartan, geo.L()));
  const Tensor lo = evaluate(geo.L()), lu = evaluate(geo.L_up());
  QSplit out{Tensor::lower(n, 2, "Q"), Tensor::lower(n, 2, "Qs"), Tensor::lower(n, 2, "Qa")};
  Tensor sym_expected = Tensor::lower(n, 2), anti_expected = Tensor::lower(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ll = 0.0;
      for (int s = 0; s < n; ++s) ll += lo(i, s, k) * lu(s, j, l) - lo(i, s, l) * lu(s, j, k);
      out.Q(i, j) = lh(i, j, l, k) - lh(i, j, k, l) + ll;
      sym_expected(i, j) = lh(j, i, l, k) - lh(j, i, k, l);
      anti_expected(i, j) = ll;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.symmetric(i, j) = 0.5 * (out.Q(i, j) + out.Q(j, i));
      out.antisymmetric(i, j) = 0.5 * (out.Q(i, j) - out.Q(j, i));
    }
  out.residual_symmetric = max_abs_diff(out.symmetric, sym_expected);
  out.residual_antisymmetric = max_abs_diff(out.antisymmetric, anti_expected);
  return out;
}

}  // namespace finslerlab
