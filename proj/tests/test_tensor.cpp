#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pgeo/tensor.hpp"
#include "support/builders.hpp"

using namespace pgeo;
using namespace pgeo::testing;

namespace {

// Finite-difference Christoffel oracle: Γ from numeric derivatives of g.
Eigen::MatrixXd fd_dg(const MetricModel& m, const Assignment& params,
                      const Eigen::VectorXd& x, int k) {
  int n = m.dim();
  double h = 1e-6;
  Eigen::VectorXd xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (metric_at(m, params, xp) - metric_at(m, params, xm)) / (2 * h);
}

double fd_christoffel(const MetricModel& m, const Assignment& params,
                      const Eigen::VectorXd& x, int l, int a, int b) {
  int n = m.dim();
  Eigen::MatrixXd ginv = metric_at(m, params, x).inverse();
  std::vector<Eigen::MatrixXd> dg;
  for (int k = 0; k < n; ++k) dg.push_back(fd_dg(m, params, x, k));
  double acc = 0;
  for (int s = 0; s < n; ++s)
    acc += 0.5 * ginv(l, s) * (dg[a](s, b) + dg[b](s, a) - dg[s](a, b));
  return acc;
}

double eval_at(const Expr& e, const Assignment& a) { return evaluate_double(e, a); }

}  // namespace

TEST_CASE("flat null metric has vanishing connection") {
  MetricModel m = minkowski_null(2);
  CurvaturePack p = christoffel(m);
  for (int l = 0; l < 4; ++l)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) CHECK(p.gamma[l][a][b].is_zero());
  CurvaturePack c = curvature(m);
  CHECK(c.is_flat == Tri::yes);
}

TEST_CASE("metricity holds symbolically on fixture metrics") {
  for (const MetricModel& m : {minkowski_null(2), example71(), u2mu_metric(), ads4()}) {
    INFO("metric ", m.name);
    CurvaturePack p = christoffel(m);
    int n = m.dim();
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          Expr nabla_g = m.g[a][b].derivative(m.chart[c]);
          for (int l = 0; l < n; ++l)
            nabla_g = nabla_g - p.gamma[l][c][a] * m.g[l][b] - p.gamma[l][c][b] * m.g[a][l];
          CHECK(nabla_g.is_zero());
        }
  }
}

TEST_CASE("plane-wave connection against finite-difference oracle") {
  // 2dudv + u z^2 du^2 + dz^2: Γ^v_{uu} = z^2/2 (∝ ∂u profile), Γ^z_{uu} = -u z.
  MetricModel m = make_metric({"u", "v", "z"},
                              {{"u v", "2"}, {"u u", "u*z^2"}, {"z z", "1"}}, {});
  m.sample_point = sample({{"u", Rat(1)}, {"v", Rat(0)}, {"z", Rat(1, 2)}});
  CurvaturePack p = christoffel(m);
  CHECK(p.gamma[1][0][0].identical(PE("1/2*z^2")));
  CHECK(p.gamma[2][0][0].identical(PE("-u*z")));

  Assignment params;
  Eigen::VectorXd x(3);
  x << 1.0, 0.3, 0.5;
  for (int l = 0; l < 3; ++l)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Assignment at;
        at.set_real("u", Real(x[0]));
        at.set_real("v", Real(x[1]));
        at.set_real("z", Real(x[2]));
        double sym = eval_at(p.gamma[l][a][b], at);
        double fd = fd_christoffel(m, params, x, l, a, b);
        CHECK(std::abs(sym - fd) < 1e-8);
      }
}

TEST_CASE("example-7 metric connection: Gamma^x_ux = 1/(4u)") {
  MetricModel m = example71();
  CurvaturePack p = christoffel(m);
  int xi = m.coord_index("x1");
  CHECK(p.gamma[xi][0][xi].identical(PE("1/(4*u)")));

  // FD oracle at u=1
  Eigen::VectorXd x(4);
  x << 1.0, 0.2, 0.1, -0.3;
  double fd = fd_christoffel(m, {}, x, xi, 0, xi);
  CHECK(std::abs(fd - 0.25) < 1e-8);
}

TEST_CASE("AdS4 fixture: Einstein with negative lambda, conformally flat, locally symmetric") {
  MetricModel m = ads4();
  CurvaturePack c = curvature(m);
  CHECK(c.is_einstein == Tri::yes);
  CHECK(c.is_conformally_flat == Tri::yes);
  CHECK(c.is_locally_symmetric == Tri::yes);
  CHECK(c.is_flat == Tri::no);
  // λ = -3/L^2 pins the sign convention
  CHECK(c.einstein_lambda.identical(PE("-3/L^2")));
}

TEST_CASE("Cahen-Wallach with constant profile is locally symmetric") {
  MetricModel m = cahen_wallach("-1", "-2");
  CurvaturePack c = curvature(m);
  CHECK(c.is_locally_symmetric == Tri::yes);
  CHECK(c.is_flat == Tri::no);
  CHECK(c.is_ricci_flat == Tri::no);
}

TEST_CASE("first Bianchi identity on fixtures") {
  for (const MetricModel& m : {example71(), cahen_wallach("-1", "-3")}) {
    CurvaturePack p = curvature(m);
    int n = m.dim();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            Expr cyc = p.riemann[a][b][c][d] + p.riemann[a][c][d][b] + p.riemann[a][d][b][c];
            CHECK(cyc.is_zero());
          }
  }
}

TEST_CASE("lie derivative: ∂_v on v-independent adapted metric vanishes") {
  MetricModel m = example71();
  VectorFieldExpr X{{Expr(), Expr::integer(1), Expr(), Expr()}};
  CHECK(is_killing(m, X) == Tri::yes);
}

TEST_CASE("lie derivative: homogeneity witness of the u^2mu wave") {
  MetricModel m = u2mu_metric();
  // X = -u ∂u + v ∂v + mu (y1 ∂y1 + y2 ∂y2)
  VectorFieldExpr X{{PE("-u"), PE("v"), PE("mu*y1"), PE("mu*y2")}};
  CHECK(is_killing(m, X) == Tri::yes);
  // the coefficient matters: 2mu is not Killing
  VectorFieldExpr Y{{PE("-u"), PE("v"), PE("2*mu*y1"), PE("2*mu*y2")}};
  CHECK(is_killing(m, Y) == Tri::no);
}

TEST_CASE("vector field commutator") {
  std::vector<std::string> chart{"x", "y"};
  VectorFieldExpr X{{PE("1"), Expr()}};               // ∂x
  VectorFieldExpr R{{PE("-y"), PE("x")}};             // rotation
  VectorFieldExpr C = vf_commutator(chart, X, R);
  CHECK(C.comps[0].is_zero());
  CHECK(C.comps[1].is_one());  // [∂x, rot] = ∂y
}

TEST_CASE("killing transport: flat metric, constant state is stationary") {
  MetricModel m = minkowski_null(2);
  Eigen::VectorXd x0(4), v0(4);
  x0 << 0, 0, 0, 0;
  v0 << 1, 0, 0, 0;  // ∂u, null
  GeodesicCurve curve = integrate_geodesic(m, {}, x0, v0, 1.0, 200);
  KillingTransportState init{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(4, 4)};
  init.zeta << 0, 1, 0.5, 0;
  auto states = killing_transport(m, {}, curve, init);
  CHECK((states.back().zeta - init.zeta).norm() < 1e-12);
  CHECK(states.back().A.norm() < 1e-12);
}

TEST_CASE("killing transport: flat metric rotation generator reproduces linear field") {
  MetricModel m = minkowski_null(2);
  Eigen::VectorXd x0(4), v0(4);
  x0 << 0, 0, 0, 0;
  v0 << 1, 0, 1, 0;  // slanted geodesic so x(t) moves in y1
  GeodesicCurve curve = integrate_geodesic(m, {}, x0, v0, 1.0, 400);
  Eigen::MatrixXd G = metric_at(m, {}, x0);
  // rotation generator in the (y1,y2) plane, g-skew
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
  B(2, 3) = 1;
  B(3, 2) = -1;
  Eigen::MatrixXd A = G.inverse() * B;
  CHECK(skew_defect(G, A) < 1e-12);
  KillingTransportState init{Eigen::VectorXd::Zero(4), A};
  auto states = killing_transport(m, {}, curve, init);
  // closed form: ζ(t) = -A (x(t) - x0)
  for (std::size_t i = 0; i < states.size(); i += 97) {
    Eigen::VectorXd expect = -A * (curve.xs[i] - x0);
    CHECK((states[i].zeta - expect).norm() < 1e-9);
  }
}

namespace {

// Transverse Killing field of 2dudv - z^2 du^2 + dz^2 (CW, A = -1):
// ζ = sin(u) ∂z - cos(u) z ∂v, with b'' = -b.
struct CwKilling {
  MetricModel m;
  CwKilling()
      : m(make_metric({"u", "v", "z"}, {{"u v", "2"}, {"u u", "-z^2"}, {"z z", "1"}}, {})) {
    m.sample_point = sample({{"u", Rat(0)}, {"v", Rat(0)}, {"z", Rat(0)}});
  }

  Eigen::VectorXd zeta_at(double u, double z) const {
    Eigen::VectorXd out(3);
    out << 0, -std::cos(u) * z, std::sin(u);
    return out;
  }
};

double transport_error(const CwKilling& fix, int steps) {
  Eigen::VectorXd x0(3), v0(3);
  x0 << 0, 0, 0;
  v0 << 1, 0, 0;
  GeodesicCurve curve = integrate_geodesic(fix.m, {}, x0, v0, 1.0, steps);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  // A = -∇ζ at origin: nonzero entries A^z_u = -1, A^v_z = 1
  A(2, 0) = -1;
  A(1, 2) = 1;
  KillingTransportState init{Eigen::VectorXd::Zero(3), A};
  auto states = killing_transport(fix.m, {}, curve, init);
  double err = 0;
  for (std::size_t i = 0; i < states.size(); i += std::max<std::size_t>(1, steps / 8)) {
    Eigen::VectorXd expect = fix.zeta_at(curve.xs[i][0], curve.xs[i][2]);
    err = std::max(err, (states[i].zeta - expect).norm());
  }
  return err;
}

}  // namespace

TEST_CASE("killing transport reproduces a known Killing field (CW)") {
  CwKilling fix;
  // the initial A is g-skew at the base point
  Eigen::MatrixXd G = metric_at(fix.m, {}, Eigen::Vector3d(0, 0, 0));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(2, 0) = -1;
  A(1, 2) = 1;
  CHECK(skew_defect(G, A) < 1e-12);

  double err = transport_error(fix, 10000);
  CHECK(err < 1e-6);

  // skewness and g(ζ, γ') are preserved along the way
  Eigen::VectorXd x0(3), v0(3);
  x0 << 0, 0, 0;
  v0 << 1, 0, 0;
  GeodesicCurve curve = integrate_geodesic(fix.m, {}, x0, v0, 1.0, 2000);
  auto states = killing_transport(fix.m, {}, curve, KillingTransportState{v0, A});
  double pairing0 = 0;
  for (std::size_t i = 0; i < states.size(); i += 250) {
    Eigen::MatrixXd Gi = metric_at(fix.m, {}, curve.xs[i]);
    CHECK(skew_defect(Gi, states[i].A) < 1e-7);
    double pairing = states[i].zeta.transpose() * Gi * curve.vs[i];
    if (i == 0) pairing0 = pairing;
    CHECK(std::abs(pairing - pairing0) < 1e-7);
  }
}

TEST_CASE("killing transport converges at 4th order") {
  CwKilling fix;
  double e1 = transport_error(fix, 40);
  double e2 = transport_error(fix, 80);
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("transport homogeneity: feasible for u^2mu, infeasible for example-7 source") {
  Assignment params;
  params.set("mu", Rat(3, 4));

  MetricModel w = u2mu_metric();
  Eigen::VectorXd x0(4), v0(4);
  x0 << 1, 0, 0, 0;
  v0 << 1, 0, 0, 0;
  auto r1 = homogeneous_geodesic_test_transport(w, params, x0, v0, 1.0, 2000, 32);
  CHECK(r1.verdict == Feasibility::feasible);

  MetricModel e = example71();
  auto r2 = homogeneous_geodesic_test_transport(e, {}, x0, v0, 1.0, 2000, 32);
  CHECK(r2.verdict == Feasibility::infeasible);

  MetricModel f = minkowski_null(2);
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(4);
  auto r3 = homogeneous_geodesic_test_transport(f, {}, y0, v0, 1.0, 500, 16);
  CHECK(r3.verdict == Feasibility::feasible);
}
