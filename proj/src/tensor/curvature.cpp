#include <functional>

#include "pgeo/tensor.hpp"

namespace pgeo {

namespace {

// equal-to-zero over a collection, downgrading to undecided on probable-only
// equality or budget blowups.
Tri all_zero(const std::vector<Expr>& items) {
  bool all_proved = true;
  for (const auto& e : items) {
    Equality q;
    try {
      q = check_equal(e, Expr());
    } catch (const BudgetExceeded&) {
      return Tri::undecided;
    }
    if (q == Equality::not_equal) return Tri::no;
    if (q != Equality::proved_equal) all_proved = false;
  }
  return all_proved ? Tri::yes : Tri::undecided;
}

}  // namespace

CurvaturePack christoffel(const MetricModel& m) {
  m.validate();
  int n = m.dim();
  CurvaturePack p;
  symbolic_inverse(m.g, p.ginv, p.det);

  // ∂_m g_{sn}
  std::vector<ExprMat> dg(n, expr_mat(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[k][i][j] = m.g[i][j].derivative(m.chart[k]);

  p.gamma.assign(n, expr_mat(n, n));
  Expr half = Expr::num(Rat(1, 2));
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        Expr acc;
        for (int s = 0; s < n; ++s) {
          if (p.ginv[l][s].is_zero()) continue;
          acc = acc + p.ginv[l][s] * (dg[a][s][b] + dg[b][s][a] - dg[s][a][b]);
        }
        acc = half * acc;
        p.gamma[l][a][b] = acc;
        p.gamma[l][b][a] = acc;
      }
  return p;
}

CurvaturePack curvature(const MetricModel& m) {
  CurvaturePack p = christoffel(m);
  int n = m.dim();

  // R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{cl}Γ^l_{db} − Γ^a_{dl}Γ^l_{cb}
  p.riemann.assign(n, std::vector<ExprMat>(n, expr_mat(n, n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          Expr acc = p.gamma[a][d][b].derivative(m.chart[c]) -
                     p.gamma[a][c][b].derivative(m.chart[d]);
          for (int l = 0; l < n; ++l) {
            if (!p.gamma[a][c][l].is_zero() && !p.gamma[l][d][b].is_zero())
              acc = acc + p.gamma[a][c][l] * p.gamma[l][d][b];
            if (!p.gamma[a][d][l].is_zero() && !p.gamma[l][c][b].is_zero())
              acc = acc - p.gamma[a][d][l] * p.gamma[l][c][b];
          }
          p.riemann[a][b][c][d] = acc;
          p.riemann[a][b][d][c] = -acc;
        }

  // Ricci, scalar
  p.ricci = expr_mat(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = b; d < n; ++d) {
      Expr acc;
      for (int a = 0; a < n; ++a) acc = acc + p.riemann[a][b][a][d];
      p.ricci[b][d] = acc;
      p.ricci[d][b] = acc;
    }
  {
    Expr acc;
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        if (!p.ginv[b][d].is_zero()) acc = acc + p.ginv[b][d] * p.ricci[b][d];
    p.scalar = acc;
  }

  // lowered Riemann
  p.riemann_low.assign(n, std::vector<ExprMat>(n, expr_mat(n, n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          Expr acc;
          for (int l = 0; l < n; ++l)
            if (!m.g[a][l].is_zero()) acc = acc + m.g[a][l] * p.riemann[l][b][c][d];
          p.riemann_low[a][b][c][d] = acc;
          p.riemann_low[a][b][d][c] = -acc;
        }

  p.has_curvature = true;

  try {
    // flatness
    std::vector<Expr> riem_flat;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = c + 1; d < n; ++d) riem_flat.push_back(p.riemann[a][b][c][d]);
    p.is_flat = all_zero(riem_flat);

    std::vector<Expr> ric_flat;
    for (int b = 0; b < n; ++b)
      for (int d = b; d < n; ++d) ric_flat.push_back(p.ricci[b][d]);
    p.is_ricci_flat = all_zero(ric_flat);

    // Einstein: Ric = λ g with constant λ = scalar/n
    {
      Expr lambda = p.scalar / Expr::integer(n);
      std::vector<Expr> defect;
      for (int b = 0; b < n; ++b)
        for (int d = b; d < n; ++d) defect.push_back(p.ricci[b][d] - lambda * m.g[b][d]);
      for (const auto& c : m.chart) defect.push_back(lambda.derivative(c));
      p.is_einstein = all_zero(defect);
      if (p.is_einstein == Tri::yes) p.einstein_lambda = lambda;
    }

    // conformal flatness
    if (n >= 4) {
      p.weyl.assign(n, std::vector<ExprMat>(n, expr_mat(n, n)));
      Expr c1 = Expr::integer(1) / Expr::integer(n - 2);
      Expr c2 = Expr::integer(1) / (Expr::integer(n - 1) * Expr::integer(n - 2));
      std::vector<Expr> weyl_flat;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = c + 1; d < n; ++d) {
              Expr w = p.riemann_low[a][b][c][d] -
                       c1 * (m.g[a][c] * p.ricci[b][d] - m.g[a][d] * p.ricci[b][c] +
                             m.g[b][d] * p.ricci[a][c] - m.g[b][c] * p.ricci[a][d]) +
                       c2 * p.scalar *
                           (m.g[a][c] * m.g[b][d] - m.g[a][d] * m.g[b][c]);
              p.weyl[a][b][c][d] = w;
              p.weyl[a][b][d][c] = -w;
              weyl_flat.push_back(w);
            }
      p.is_conformally_flat = all_zero(weyl_flat);
    } else if (n == 3) {
      // Cotton tensor of the Schouten tensor P = Ric − (R/4) g
      ExprMat P = expr_mat(n, n);
      Expr quarter = Expr::num(Rat(1, 4));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) P[a][b] = p.ricci[a][b] - quarter * p.scalar * m.g[a][b];
      auto covd = [&](int c, int a, int b) {
        Expr acc = P[a][b].derivative(m.chart[c]);
        for (int f = 0; f < n; ++f)
          acc = acc - p.gamma[f][c][a] * P[f][b] - p.gamma[f][c][b] * P[a][f];
        return acc;
      };
      std::vector<Expr> cotton_flat;
      p.cotton.assign(n, std::vector<ExprMat>(n, expr_mat(n, 1)));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            Expr v = covd(c, a, b) - covd(b, a, c);
            p.cotton[a][b][c][0] = v;
            cotton_flat.push_back(v);
          }
      p.is_conformally_flat = all_zero(cotton_flat);
    } else {
      p.is_conformally_flat = Tri::yes;
    }

    // local symmetry: ∇_e R_{abcd} = 0
    {
      std::vector<Expr> delr;
      for (int e = 0; e < n; ++e)
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b)
            for (int c = 0; c < n; ++c)
              for (int d = c + 1; d < n; ++d) {
                Expr acc = p.riemann_low[a][b][c][d].derivative(m.chart[e]);
                for (int f = 0; f < n; ++f) {
                  if (!p.gamma[f][e][a].is_zero())
                    acc = acc - p.gamma[f][e][a] * p.riemann_low[f][b][c][d];
                  if (!p.gamma[f][e][b].is_zero())
                    acc = acc - p.gamma[f][e][b] * p.riemann_low[a][f][c][d];
                  if (!p.gamma[f][e][c].is_zero())
                    acc = acc - p.gamma[f][e][c] * p.riemann_low[a][b][f][d];
                  if (!p.gamma[f][e][d].is_zero())
                    acc = acc - p.gamma[f][e][d] * p.riemann_low[a][b][c][f];
                }
                delr.push_back(acc);
              }
      p.is_locally_symmetric = all_zero(delr);
    }
  } catch (const BudgetExceeded&) {
    // leave remaining flags undecided
  }

  return p;
}

ExprMat lie_derivative_metric(const MetricModel& m, const VectorFieldExpr& X) {
  int n = m.dim();
  if (static_cast<int>(X.comps.size()) != n)
    throw ValidationError("vector field component count does not match chart");
  ExprMat out = expr_mat(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Expr acc;
      for (int s = 0; s < n; ++s) {
        if (!X.comps[s].is_zero())
          acc = acc + X.comps[s] * m.g[a][b].derivative(m.chart[s]);
        acc = acc + m.g[s][b] * X.comps[s].derivative(m.chart[a]) +
              m.g[a][s] * X.comps[s].derivative(m.chart[b]);
      }
      out[a][b] = acc;
      out[b][a] = acc;
    }
  return out;
}

Tri is_killing(const MetricModel& m, const VectorFieldExpr& X) {
  ExprMat L = lie_derivative_metric(m, X);
  std::vector<Expr> flat;
  for (int a = 0; a < m.dim(); ++a)
    for (int b = a; b < m.dim(); ++b) flat.push_back(L[a][b]);
  return all_zero(flat);
}

}  // namespace pgeo
