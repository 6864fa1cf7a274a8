#pragma once

// Metric models shared by the test suites.

#include <string>
#include <vector>

#include "finslerlab/metrics.hpp"

namespace testmodels {

using finslerlab::Box;
using finslerlab::Family;
using finslerlab::MetricModel;
using finslerlab::MetricSpec;

inline Box cube(int n, double lo = -1.0, double hi = 1.0) {
  return Box{std::vector<double>(static_cast<std::size_t>(n), lo), std::vector<double>(static_cast<std::size_t>(n), hi)};
}

inline MetricModel euclidean(int n, double half_width = 1.0) {
  MetricSpec s;
  s.family = Family::kRiemannian;
  s.dimension = n;
  s.domain = cube(n, -half_width, half_width);
  return finslerlab::build_metric(s);
}

// Unit sphere in (polar, azimuth) coordinates away from the poles.
inline MetricModel sphere() {
  MetricSpec s;
  s.family = Family::kRiemannian;
  s.dimension = 2;
  s.domain = Box{{0.3, -1.0}, {2.8, 1.0}};
  s.a = {{"1", "0"}, {"0", "sin(x1)^2"}};
  return finslerlab::build_metric(s);
}

// A non-constant-curvature Riemannian metric on a 3-cube.
inline MetricModel warped3() {
  MetricSpec s;
  s.family = Family::kRiemannian;
  s.dimension = 3;
  s.domain = cube(3);
  s.a = {{"1 + 0.1*x2^2", "0.05*x3", "0"}, {"0.05*x3", "exp(0.2*x1)", "0"}, {"0", "0", "1 + 0.1*sin(x1)"}};
  return finslerlab::build_metric(s);
}

// Randers with parallel (constant) b: Berwald, not Riemannian.
inline MetricModel randers_berwald(int n) {
  MetricSpec s;
  s.family = Family::kRanders;
  s.dimension = n;
  s.domain = cube(n);
  s.b = n == 2 ? std::vector<std::string>{"0.3", "0.1"} : std::vector<std::string>{"0.3", "0.1", "0"};
  return finslerlab::build_metric(s);
}

// Randers with a non-closed b: not Landsberg.
inline MetricModel randers(int n) {
  MetricSpec s;
  s.family = Family::kRanders;
  s.dimension = n;
  s.domain = cube(n);
  s.b = n == 2 ? std::vector<std::string>{"0.3*sin(x2)", "0"} : std::vector<std::string>{"0.3*sin(x2)", "0.1*x3*x1", "0"};
  return finslerlab::build_metric(s);
}

// F = (alpha + beta)^2 / alpha
inline MetricModel square(int n) {
  MetricSpec s;
  s.family = Family::kAlphaBeta;
  s.dimension = n;
  s.domain = cube(n);
  s.phi = "(1+s)^2";
  s.b = n == 2 ? std::vector<std::string>{"0.4+0.1*sin(x2)", "0.1*x1"}
               : std::vector<std::string>{"0.4+0.1*sin(x2)", "0.1*x3*x1", "0.1"};
  return finslerlab::build_metric(s);
}

}  // namespace testmodels
