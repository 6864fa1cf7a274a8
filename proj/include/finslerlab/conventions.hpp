#pragma once

// Pinned index orders, signs and normalizations. Every entry is exercised by a
// test; the hash of this table goes into each report so that a report can be
// matched to the conventions that produced it.

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace finslerlab {

inline constexpr std::string_view kVersion = "1.0.0";

struct Convention {
  std::string_view key;
  std::string_view statement;
};

inline constexpr std::array<Convention, 14> kConventions = {{
    {"coords", "Taylor variables 0..n-1 are x, n..2n-1 are y; indices are zero-based"},
    {"g", "g_ij = 1/2 d^2(F^2)/dy^i dy^j; h_ij = g_ij - F_yi F_yj"},
    {"C", "C_ijk = 1/2 dg_ij/dy^k; I_k = g^ij C_ijk; A = F C"},
    {"spray", "G^i = 1/4 g^il (y^k d^2F^2/dx^k dy^l - dF^2/dx^l); N^i_j = dG^i/dy^j; B^i_jkl = d^3G^i/dy^j dy^k dy^l"},
    {"frame", "adapted frame delta_k = d/dx^k - N^m_k d/dy^m, coframe (dx^k, dy^k + N^k_m dx^m)"},
    {"connection", "H and V stored [i][j][k]: nabla_{delta_k} d_j = H^i_jk d_i, nabla_{d/dy^k} d_j = V^i_jk d_i"},
    {"landsberg", "L_ijk = C_ijk|m y^m (Chern); dN^i_j/dy^k = Gamma*^i_jk + L^i_jk; L_jkl = -1/2 y_m B^m_jkl"},
    {"J", "J_k = g^ij L_ijk; Lbar_ijk = L_ijk|m y^m"},
    {"riemann", "R^i_k = 2 dG^i/dx^k - y^j d^2G^i/dx^j dy^k + 2 G^j d^2G^i/dy^j dy^k - N^i_j N^j_k"},
    {"flag", "K(y, v) = g(R_y v, v) / (g(y,y) g(v,v) - g(y,v)^2)"},
    {"curvature", "R, P, Q stored [j][i][k][l] (section j, output i); P has k horizontal and l vertical"},
    {"vertical_scale", "P and Q use natural fiber directions d/dy; F-normalized blocks are F P and F^2 Q"},
    {"processes", "matsumoto_c V-C; matsumoto_l H+L; shen_c H-F C; shen_l V-L/F; N is never changed"},
    {"cov_deriv", "new slot appended last; '.' derivative is F times the natural vertical derivative"},
}};

// FNV-1a over key=statement lines.
inline std::string conventions_hash() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& c : kConventions) {
    mix(c.key);
    mix("=");
    mix(c.statement);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace finslerlab
