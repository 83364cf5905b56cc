#include "pgeo/tensor.hpp"

namespace pgeo {

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    case Tri::undecided: return "undecided";
  }
  return "?";
}

const char* feasibility_name(Feasibility f) {
  switch (f) {
    case Feasibility::feasible: return "feasible";
    case Feasibility::infeasible: return "infeasible";
    case Feasibility::undecided: return "undecided";
  }
  return "?";
}

ExprMat expr_mat(int rows, int cols) {
  return ExprMat(rows, std::vector<Expr>(cols));
}

// Determinant by Laplace expansion over column subsets with memoization:
// rows are consumed in order, the mask records surviving columns.
Expr symbolic_det(const ExprMat& m) {
  int n = static_cast<int>(m.size());
  if (n == 0) return Expr::integer(1);
  if (n > 12) throw ValidationError("determinant beyond supported dimension");
  std::map<unsigned, Expr> memo;
  std::function<Expr(int, unsigned)> det = [&](int row, unsigned mask) -> Expr {
    if (row == n) return Expr::integer(1);
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    Expr acc;
    int sign = 1;
    for (int c = 0; c < n; ++c) {
      if (!(mask & (1u << c))) continue;
      if (!m[row][c].is_zero()) {
        Expr sub = det(row + 1, mask & ~(1u << c));
        Expr piece = m[row][c] * sub;
        acc = sign > 0 ? acc + piece : acc - piece;
      }
      sign = -sign;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return det(0, (1u << n) - 1);
}

namespace {

// Minor with row i and column j removed.
Expr minor_det(const ExprMat& m, int i, int j) {
  int n = static_cast<int>(m.size());
  ExprMat sub = expr_mat(n - 1, n - 1);
  int r = 0;
  for (int a = 0; a < n; ++a) {
    if (a == i) continue;
    int c = 0;
    for (int b = 0; b < n; ++b) {
      if (b == j) continue;
      sub[r][c] = m[a][b];
      ++c;
    }
    ++r;
  }
  return symbolic_det(sub);
}

}  // namespace

void symbolic_inverse(const ExprMat& m, ExprMat& inv_out, Expr& det_out) {
  int n = static_cast<int>(m.size());
  det_out = symbolic_det(m);
  if (det_out.is_zero())
    throw ValidationError("matrix is symbolically singular (det = 0)");
  inv_out = expr_mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr cof = minor_det(m, j, i);
      if ((i + j) % 2) cof = -cof;
      inv_out[i][j] = cof / det_out;
    }
}

int MetricModel::coord_index(const std::string& c) const {
  for (std::size_t i = 0; i < chart.size(); ++i)
    if (chart[i] == c) return static_cast<int>(i);
  throw ValidationError("unknown coordinate '" + c + "'");
}

Assignment MetricModel::full_point() const {
  if (sample_point) return *sample_point;
  Assignment a;
  for (const auto& c : chart) a.set(c, Rat(1));
  for (const auto& p : parameters) a.set(p, Rat(1));
  return a;
}

void MetricModel::validate() const {
  int n = dim();
  if (n < 2) throw ValidationError("metric needs at least two coordinates");
  if (n > 8) throw ValidationError("charts beyond dimension 8 are not supported");
  if (static_cast<int>(g.size()) != n)
    throw ValidationError("metric matrix size does not match chart");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(g[i].size()) != n)
      throw ValidationError("metric matrix is not square");
    for (int j = 0; j < i; ++j)
      if (!g[i][j].identical(g[j][i]))
        throw ValidationError("metric component g(" + chart[i] + "," + chart[j] +
                              ") is not symmetric");
  }
  // numeric nondegeneracy / signature at the sample point
  Assignment pt = full_point();
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = evaluate_double(g[i][j], pt);
  double det = G.determinant();
  if (std::abs(det) < 1e-12)
    throw ValidationError("metric is numerically degenerate at the sample point");
  if (declared_signature) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    int negatives = 0;
    for (int i = 0; i < n; ++i)
      if (es.eigenvalues()[i] < 0) ++negatives;
    int expected_neg = std::min(negatives, n - negatives);  // orientation-free count
    if (*declared_signature == "lorentzian") {
      if (std::min(negatives, n - negatives) != 1)
        throw ValidationError("metric is not lorentzian at the sample point");
    } else if (*declared_signature == "riemannian") {
      if (expected_neg != 0)
        throw ValidationError("metric is not riemannian at the sample point");
    }
  }
}

VectorFieldExpr vf_commutator(const std::vector<std::string>& chart,
                              const VectorFieldExpr& X, const VectorFieldExpr& Y) {
  int n = static_cast<int>(chart.size());
  VectorFieldExpr out;
  out.comps.resize(n);
  for (int m = 0; m < n; ++m) {
    Expr acc;
    for (int s = 0; s < n; ++s) {
      acc = acc + X.comps[s] * Y.comps[m].derivative(chart[s]) -
            Y.comps[s] * X.comps[m].derivative(chart[s]);
    }
    out.comps[m] = acc;
  }
  return out;
}

MetricModel pullback_metric(const MetricModel& m, const std::vector<std::string>& new_chart,
                            const std::map<std::string, Expr>& old_in_new) {
  int n = m.dim();
  if (static_cast<int>(new_chart.size()) != n)
    throw ValidationError("pullback chart dimension mismatch");
  // Jacobian ∂F_i/∂x'_a and substituted components.
  std::vector<std::vector<Expr>> J(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    auto it = old_in_new.find(m.chart[i]);
    if (it == old_in_new.end())
      throw ValidationError("pullback map missing coordinate '" + m.chart[i] + "'");
    for (int a = 0; a < n; ++a) J[i][a] = it->second.derivative(new_chart[a]);
  }
  std::map<std::string, Expr> sub;
  for (const auto& [k, v] : old_in_new) sub.emplace(k, v);
  MetricModel out;
  out.chart = new_chart;
  out.parameters = m.parameters;
  out.declared_signature = m.declared_signature;
  out.name = m.name + "-pullback";
  out.g = expr_mat(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Expr acc;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (m.g[i][j].is_zero()) continue;
          acc = acc + m.g[i][j].substitute(sub) * J[i][a] * J[j][b];
        }
      out.g[a][b] = acc;
      out.g[b][a] = acc;
    }
  return out;
}

}  // namespace pgeo
