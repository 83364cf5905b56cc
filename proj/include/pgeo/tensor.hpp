#ifndef PGEO_TENSOR_HPP
#define PGEO_TENSOR_HPP

#include <Eigen/Dense>
#include <optional>

#include "pgeo/expr.hpp"

namespace pgeo {

enum class Tri { yes, no, undecided };
const char* tri_name(Tri t);

using ExprMat = std::vector<std::vector<Expr>>;

ExprMat expr_mat(int rows, int cols);
/// Adjugate-over-determinant inverse; throws ValidationError when det
/// simplifies to zero.
void symbolic_inverse(const ExprMat& m, ExprMat& inv_out, Expr& det_out);
Expr symbolic_det(const ExprMat& m);

/// Coordinate chart plus a symmetric matrix of component expressions.
struct MetricModel {
  std::vector<std::string> chart;
  ExprMat g;
  std::set<std::string> parameters;
  std::optional<Assignment> sample_point;  // coordinates (and params) for numeric checks
  std::optional<std::string> declared_signature;
  std::string name;

  int dim() const { return static_cast<int>(chart.size()); }
  int coord_index(const std::string& c) const;

  /// Symmetry (canonical), nondegeneracy and signature at the sample point.
  void validate() const;

  Assignment full_point() const;  // sample point or all-ones default
};

struct VectorFieldExpr {
  std::vector<Expr> comps;
};

VectorFieldExpr vf_commutator(const std::vector<std::string>& chart,
                              const VectorFieldExpr& X, const VectorFieldExpr& Y);

struct CurvaturePack {
  ExprMat ginv;
  Expr det;
  // gamma[l][m][n] = Γ^l_{mn}
  std::vector<ExprMat> gamma;
  // riemann[a][b][c][d] = R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + ΓΓ − ΓΓ
  std::vector<std::vector<ExprMat>> riemann;
  ExprMat ricci;
  Expr scalar;
  std::vector<std::vector<ExprMat>> riemann_low;  // R_{abcd}
  std::vector<std::vector<ExprMat>> weyl;         // C_{abcd}, dim >= 4
  std::vector<std::vector<ExprMat>> cotton;       // dim == 3 (C_{abc} in [a][b][c][0])

  Tri is_flat = Tri::undecided;
  Tri is_ricci_flat = Tri::undecided;
  Tri is_einstein = Tri::undecided;
  Tri is_conformally_flat = Tri::undecided;
  Tri is_locally_symmetric = Tri::undecided;
  Expr einstein_lambda;

  bool has_curvature = false;
};

/// Connection only (Γ, g⁻¹, det).
CurvaturePack christoffel(const MetricModel& m);
/// Full pack with flags; simplification blowups downgrade flags to undecided.
CurvaturePack curvature(const MetricModel& m);

ExprMat lie_derivative_metric(const MetricModel& m, const VectorFieldExpr& X);
Tri is_killing(const MetricModel& m, const VectorFieldExpr& X);

/// g'_{ab} = Σ g_{ij}(F(x')) ∂F_i/∂x'_a ∂F_j/∂x'_b for old coords i = F_i(new).
MetricModel pullback_metric(const MetricModel& m, const std::vector<std::string>& new_chart,
                            const std::map<std::string, Expr>& old_in_new);

// ---------------------------------------------------------------------------
// Numeric side: geodesics, Killing transport, transport-based homogeneity.

struct GeodesicCurve {
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> xs;
  std::vector<Eigen::VectorXd> vs;
};

/// Fixed-step RK4 for x'' = −Γ(x)(x',x'); default resolution 10^4 steps per
/// unit parameter length.
GeodesicCurve integrate_geodesic(const MetricModel& m, const Assignment& params,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                 double t1, int steps);

struct KillingTransportState {
  Eigen::VectorXd zeta;
  Eigen::MatrixXd A;
};

/// Numeric metric at a point.
Eigen::MatrixXd metric_at(const MetricModel& m, const Assignment& params,
                          const Eigen::VectorXd& x);

/// |g(AX,Y) + g(X,AY)| max-norm; the skewness defect of A at x.
double skew_defect(const Eigen::MatrixXd& g, const Eigen::MatrixXd& A);

/// Transports (ζ, A) along the curve with D_X(ζ,A) = (∇ζ + A(X), ∇A + R(X,ζ)).
/// Returns the state at every curve node.
std::vector<KillingTransportState> killing_transport(const MetricModel& m,
                                                     const Assignment& params,
                                                     const GeodesicCurve& curve,
                                                     const KillingTransportState& init);

enum class Feasibility { feasible, infeasible, undecided };
const char* feasibility_name(Feasibility f);

struct TransportHomogeneityResult {
  Feasibility verdict = Feasibility::undecided;
  double residual = 0.0;
  Eigen::VectorXd coefficients;  // solved initial A in the so(g) basis
};

/// Decides whether some initial (ζ ∝ γ', A) transports with ζ ∥ γ' along the
/// whole curve: a linear least-squares feasibility problem over so(g_p),
/// sampled at `samples` points. residual < 1e-9 feasible, > 1e-6 infeasible,
/// in between undecided.
TransportHomogeneityResult homogeneous_geodesic_test_transport(
    const MetricModel& m, const Assignment& params, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& v0, double t1 = 1.0, int steps = 10000, int samples = 32);

}  // namespace pgeo

#endif
