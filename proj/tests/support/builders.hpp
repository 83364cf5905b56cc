#ifndef PGEO_TESTS_BUILDERS_HPP
#define PGEO_TESTS_BUILDERS_HPP

// Programmatic fixture builders shared across test suites.

#include <map>
#include <string>

#include "pgeo/tensor.hpp"

namespace pgeo::testing {

inline Expr PE(const std::string& s, std::set<std::string> positive = {"u", "L", "mu"}) {
  ParseOptions o;
  o.positive = std::move(positive);
  return parse_expr(s, o);
}

/// comps: line-element style, "a b" -> coefficient of da*db (symmetric
/// product). Diagonal "a a" -> g_aa = c, off-diagonal -> g_ab = c/2.
inline MetricModel make_metric(std::vector<std::string> chart,
                               const std::map<std::string, std::string>& comps,
                               std::set<std::string> positive = {"u", "L", "mu"},
                               std::set<std::string> parameters = {}) {
  MetricModel m;
  m.chart = std::move(chart);
  int n = m.dim();
  m.g = expr_mat(n, n);
  m.parameters = std::move(parameters);
  for (const auto& [key, val] : comps) {
    auto sp = key.find(' ');
    std::string a = key.substr(0, sp);
    std::string b = key.substr(sp + 1);
    int i = m.coord_index(a);
    int j = m.coord_index(b);
    Expr c = PE(val, positive);
    if (i == j) {
      m.g[i][i] = m.g[i][i] + c;
    } else {
      Expr half = c / Expr::integer(2);
      m.g[i][j] = m.g[i][j] + half;
      m.g[j][i] = m.g[j][i] + half;
    }
  }
  return m;
}

inline Assignment sample(std::initializer_list<std::pair<std::string, Rat>> vals) {
  Assignment a;
  for (const auto& [k, v] : vals) a.set(k, v);
  return a;
}

/// 2dudv + Σ (dy^i)^2, flat Minkowski in null coordinates.
inline MetricModel minkowski_null(int transverse = 2) {
  std::map<std::string, std::string> comps{{"u v", "2"}};
  std::vector<std::string> chart{"u", "v"};
  for (int i = 1; i <= transverse; ++i) {
    std::string y = "y" + std::to_string(i);
    chart.push_back(y);
    comps[y + " " + y] = "1";
  }
  MetricModel m = make_metric(chart, comps);
  m.name = "minkowski";
  m.declared_signature = "lorentzian";
  m.sample_point = Assignment{};
  for (const auto& c : m.chart) m.sample_point->set(c, Rat(1));
  return m;
}

/// AdS4 in adapted null coordinates: 2dudv + (4u/(L+y2)) dv dy2
/// + (L/(L+y2))^2 ((dy1)^2 + (dy2)^2). Curvature radius L > 0.
inline MetricModel ads4() {
  MetricModel m = make_metric(
      {"u", "v", "y1", "y2"},
      {{"u v", "2"},
       {"v y2", "4*u/(L+y2)"},
       {"y1 y1", "L^2/(L+y2)^2"},
       {"y2 y2", "L^2/(L+y2)^2"}},
      {"L"}, {"L"});
  m.name = "ads4";
  m.declared_signature = "lorentzian";
  m.sample_point = sample({{"u", Rat(1)}, {"v", Rat(0)}, {"y1", Rat(0)}, {"y2", Rat(0)}, {"L", Rat(1)}});
  return m;
}

/// First §-of-examples metric: 2dudv + u dv^2 + sqrt(u) ((dx1)^2 + (dx2)^2).
inline MetricModel example71() {
  MetricModel m = make_metric({"u", "v", "x1", "x2"},
                              {{"u v", "2"},
                               {"v v", "u"},
                               {"x1 x1", "sqrt(u)"},
                               {"x2 x2", "sqrt(u)"}},
                              {"u"});
  m.name = "example71";
  m.declared_signature = "lorentzian";
  m.sample_point = sample({{"u", Rat(1)}, {"v", Rat(0)}, {"x1", Rat(0)}, {"x2", Rat(0)}});
  return m;
}

/// dudv + u^(2 mu) ((dy1)^2 + (dy2)^2); incomplete singular plane wave.
inline MetricModel u2mu_metric() {
  MetricModel m = make_metric({"u", "v", "y1", "y2"},
                              {{"u v", "1"},
                               {"y1 y1", "u^(2*mu)"},
                               {"y2 y2", "u^(2*mu)"}},
                              {"u", "mu"}, {"mu"});
  m.name = "u2mu";
  m.declared_signature = "lorentzian";
  m.sample_point = sample({{"u", Rat(1)}, {"v", Rat(0)}, {"y1", Rat(0)}, {"y2", Rat(0)}, {"mu", Rat(3, 4)}});
  return m;
}

/// Cahen–Wallach in Brinkmann form: 2dudv + (a1 z1^2 + a2 z2^2) du^2 + dz^2.
inline MetricModel cahen_wallach(const std::string& a1 = "-1", const std::string& a2 = "-1") {
  MetricModel m = make_metric({"u", "v", "z1", "z2"},
                              {{"u v", "2"},
                               {"u u", "(" + a1 + ")*z1^2 + (" + a2 + ")*z2^2"},
                               {"z1 z1", "1"},
                               {"z2 z2", "1"}},
                              {});
  m.name = "cahen-wallach";
  m.declared_signature = "lorentzian";
  m.sample_point = sample({{"u", Rat(0)}, {"v", Rat(0)}, {"z1", Rat(0)}, {"z2", Rat(0)}});
  return m;
}

/// Kaigorodov space, n = 2 (5d), L symbolic:
/// e^{-4Lr} dx^2 + e^{4Lr}(2 dx dt + dy1^2 + dy2^2) + dr^2.
inline MetricModel kaigorodov() {
  MetricModel m = make_metric({"t", "x", "y1", "y2", "r"},
                              {{"x x", "exp(-4*L*r)"},
                               {"x t", "2*exp(4*L*r)"},
                               {"y1 y1", "exp(4*L*r)"},
                               {"y2 y2", "exp(4*L*r)"},
                               {"r r", "1"}},
                              {"L"}, {"L"});
  m.name = "kaigorodov";
  m.declared_signature = "lorentzian";
  m.sample_point = sample(
      {{"t", Rat(0)}, {"x", Rat(0)}, {"y1", Rat(0)}, {"y2", Rat(0)}, {"r", Rat(0)}, {"L", Rat(1)}});
  return m;
}

/// Kaigorodov in coordinates adapted to the K0 = ∂t null geodesic:
/// u = e^{4Lr} t, v = x, w = r  =>
/// 2dudv + e^{-4Lw} dv^2 - 8Lu dv dw + e^{4Lw}(dy1^2+dy2^2) + dw^2.
inline MetricModel kaigorodov_adapted() {
  MetricModel m = make_metric({"u", "v", "y1", "y2", "w"},
                              {{"u v", "2"},
                               {"v v", "exp(-4*L*w)"},
                               {"v w", "-8*L*u"},
                               {"y1 y1", "exp(4*L*w)"},
                               {"y2 y2", "exp(4*L*w)"},
                               {"w w", "1"}},
                              {"L"}, {"L"});
  m.name = "kaigorodov-adapted";
  m.declared_signature = "lorentzian";
  m.sample_point = sample(
      {{"u", Rat(1)}, {"v", Rat(0)}, {"y1", Rat(0)}, {"y2", Rat(0)}, {"w", Rat(0)}, {"L", Rat(1)}});
  return m;
}

}  // namespace pgeo::testing

#endif
