// Numeric side: geodesic RK4, Killing transport on TM ⊕ so(TM), and the
// transport-based homogeneity feasibility test.

#include <functional>

#include "pgeo/tensor.hpp"

namespace pgeo {

namespace {

struct CompiledConnection {
  int n;
  std::vector<CompiledExpr> gamma;    // Γ^l_{ab}, index l*n*n + a*n + b
  std::vector<CompiledExpr> riemann;  // R^a_{bcd}, index ((a*n+b)*n+c)*n+d
  bool has_riemann = false;

  double G(int l, int a, int b, const double* x) const {
    return gamma[(l * n + a) * n + b].eval(x);
  }
  double R(int a, int b, int c, int d, const double* x) const {
    return riemann[((a * n + b) * n + c) * n + d].eval(x);
  }
};

CompiledConnection compile_connection(const MetricModel& m, const Assignment& params,
                                      bool need_riemann) {
  CompiledConnection cc;
  cc.n = m.dim();
  CurvaturePack p = need_riemann ? curvature(m) : christoffel(m);
  cc.gamma.reserve(cc.n * cc.n * cc.n);
  for (int l = 0; l < cc.n; ++l)
    for (int a = 0; a < cc.n; ++a)
      for (int b = 0; b < cc.n; ++b)
        cc.gamma.emplace_back(p.gamma[l][a][b], m.chart, params);
  if (need_riemann) {
    cc.riemann.reserve(cc.n * cc.n * cc.n * cc.n);
    for (int a = 0; a < cc.n; ++a)
      for (int b = 0; b < cc.n; ++b)
        for (int c = 0; c < cc.n; ++c)
          for (int d = 0; d < cc.n; ++d)
            cc.riemann.emplace_back(p.riemann[a][b][c][d], m.chart, params);
    cc.has_riemann = true;
  }
  return cc;
}

}  // namespace

Eigen::MatrixXd metric_at(const MetricModel& m, const Assignment& params,
                          const Eigen::VectorXd& x) {
  int n = m.dim();
  Assignment a = params;
  for (int i = 0; i < n; ++i) a.set_real(m.chart[i], Real(x[i]));
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = evaluate_double(m.g[i][j], a);
  return G;
}

double skew_defect(const Eigen::MatrixXd& g, const Eigen::MatrixXd& A) {
  Eigen::MatrixXd B = g * A;
  return (B + B.transpose()).cwiseAbs().maxCoeff();
}

GeodesicCurve integrate_geodesic(const MetricModel& m, const Assignment& params,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                 double t1, int steps) {
  int n = m.dim();
  CompiledConnection cc = compile_connection(m, params, false);

  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& ax,
                 Eigen::VectorXd& av) {
    ax = v;
    av.setZero(n);
    for (int l = 0; l < n; ++l) {
      double acc = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double gam = cc.G(l, a, b, x.data());
          if (gam != 0) acc += gam * v[a] * v[b];
        }
      av[l] = -acc;
    }
  };

  GeodesicCurve out;
  out.ts.reserve(steps + 1);
  out.xs.reserve(steps + 1);
  out.vs.reserve(steps + 1);
  double h = t1 / steps;
  Eigen::VectorXd x = x0, v = v0;
  out.ts.push_back(0);
  out.xs.push_back(x);
  out.vs.push_back(v);
  Eigen::VectorXd k1x(n), k1v(n), k2x(n), k2v(n), k3x(n), k3v(n), k4x(n), k4v(n);
  for (int s = 0; s < steps; ++s) {
    rhs(x, v, k1x, k1v);
    rhs(x + 0.5 * h * k1x, v + 0.5 * h * k1v, k2x, k2v);
    rhs(x + 0.5 * h * k2x, v + 0.5 * h * k2v, k3x, k3v);
    rhs(x + h * k3x, v + h * k3v, k4x, k4v);
    x += (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (!x.allFinite() || !v.allFinite())
      throw Error("geodesic integration blew up (step underflow near a singularity?)");
    out.ts.push_back((s + 1) * h);
    out.xs.push_back(x);
    out.vs.push_back(v);
  }
  return out;
}

namespace {

// Joint transport of several (ζ, A) states along a *given* geodesic, re-run
// as one RK4 pass through the same step grid. The curve is re-integrated
// jointly so intermediate stage positions are consistent.
std::vector<std::vector<KillingTransportState>> transport_many(
    const MetricModel& m, const Assignment& params, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& v0, double t1, int steps,
    const std::vector<KillingTransportState>& inits) {
  int n = m.dim();
  CompiledConnection cc = compile_connection(m, params, true);
  int k = static_cast<int>(inits.size());

  struct State {
    Eigen::VectorXd x, v;
    std::vector<Eigen::VectorXd> zetas;
    std::vector<Eigen::MatrixXd> As;
  };

  auto axpy = [&](State& y, double h, const State& d) {
    y.x += h * d.x;
    y.v += h * d.v;
    for (int i = 0; i < k; ++i) {
      y.zetas[i] += h * d.zetas[i];
      y.As[i] += h * d.As[i];
    }
  };

  auto rhs = [&](const State& s) {
    State d;
    d.x = s.v;
    d.v.setZero(n);
    const double* xp = s.x.data();
    // cache Γ and R at the point
    std::vector<double> Gam(n * n * n);
    for (int l = 0; l < n; ++l)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Gam[(l * n + a) * n + b] = cc.G(l, a, b, xp);
    auto G = [&](int l, int a, int b) { return Gam[(l * n + a) * n + b]; };
    for (int l = 0; l < n; ++l) {
      double acc = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) acc += G(l, a, b) * s.v[a] * s.v[b];
      d.v[l] = -acc;
    }
    d.zetas.assign(k, Eigen::VectorXd::Zero(n));
    d.As.assign(k, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < k; ++i) {
      const Eigen::VectorXd& z = s.zetas[i];
      const Eigen::MatrixXd& A = s.As[i];
      // dζ^a = −Γ^a_{bc} v^b ζ^c − A^a_b v^b
      for (int a = 0; a < n; ++a) {
        double acc = 0;
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < n; ++c) acc += G(a, b, c) * s.v[b] * z[c];
          acc += A(a, b) * s.v[b];
        }
        d.zetas[i][a] = -acc;
      }
      // dA^a_b = −Γ^a_{sc} v^s A^c_b + Γ^c_{sb} v^s A^a_c − R^a_{bcd} v^c ζ^d
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double acc = 0;
          for (int s2 = 0; s2 < n; ++s2)
            for (int c = 0; c < n; ++c)
              acc += G(a, s2, c) * s.v[s2] * A(c, b) - G(c, s2, b) * s.v[s2] * A(a, c);
          double rterm = 0;
          for (int c = 0; c < n; ++c)
            for (int dd = 0; dd < n; ++dd)
              rterm += cc.R(a, b, c, dd, xp) * s.v[c] * z[dd];
          d.As[i](a, b) = -(acc + rterm);
        }
    }
    return d;
  };

  State y;
  y.x = x0;
  y.v = v0;
  for (const auto& s : inits) {
    y.zetas.push_back(s.zeta);
    y.As.push_back(s.A);
  }

  std::vector<std::vector<KillingTransportState>> out;
  out.reserve(steps + 1);
  auto snapshot = [&](const State& s) {
    std::vector<KillingTransportState> row;
    row.reserve(k);
    for (int i = 0; i < k; ++i) row.push_back(KillingTransportState{s.zetas[i], s.As[i]});
    out.push_back(std::move(row));
  };
  snapshot(y);

  double h = t1 / steps;
  for (int s = 0; s < steps; ++s) {
    State k1 = rhs(y);
    State y2 = y;
    axpy(y2, 0.5 * h, k1);
    State k2 = rhs(y2);
    State y3 = y;
    axpy(y3, 0.5 * h, k2);
    State k3 = rhs(y3);
    State y4 = y;
    axpy(y4, h, k3);
    State k4 = rhs(y4);
    axpy(y, h / 6.0, k1);
    axpy(y, 2 * h / 6.0, k2);
    axpy(y, 2 * h / 6.0, k3);
    axpy(y, h / 6.0, k4);
    if (!y.x.allFinite())
      throw Error("killing transport: step underflow near a metric singularity");
    snapshot(y);
  }
  return out;
}

}  // namespace

std::vector<KillingTransportState> killing_transport(const MetricModel& m,
                                                     const Assignment& params,
                                                     const GeodesicCurve& curve,
                                                     const KillingTransportState& init) {
  if (curve.ts.size() < 2) throw Error("killing transport needs a non-trivial curve");
  double t1 = curve.ts.back();
  int steps = static_cast<int>(curve.ts.size()) - 1;
  // consistency of the provided curve with (x0, v0) is the caller's business;
  // the transport re-integrates jointly on the same grid.
  auto rows = transport_many(m, params, curve.xs.front(), curve.vs.front(), t1, steps,
                             {init});
  std::vector<KillingTransportState> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(r.front()));
  return out;
}

TransportHomogeneityResult homogeneous_geodesic_test_transport(
    const MetricModel& m, const Assignment& params, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& v0, double t1, int steps, int samples) {
  int n = m.dim();
  Eigen::MatrixXd G0 = metric_at(m, params, x0);

  // basis of so(g) at x0: E = g^{-1} B for antisymmetric B
  std::vector<Eigen::MatrixXd> so_basis;
  Eigen::MatrixXd Ginv = G0.inverse();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
      B(i, j) = 1;
      B(j, i) = -1;
      so_basis.push_back(Ginv * B);
    }
  int mdim = static_cast<int>(so_basis.size());

  std::vector<KillingTransportState> inits;
  inits.push_back(KillingTransportState{v0, Eigen::MatrixXd::Zero(n, n)});
  for (const auto& E : so_basis)
    inits.push_back(KillingTransportState{Eigen::VectorXd::Zero(n), E});

  auto rows = transport_many(m, params, x0, v0, t1, steps, inits);

  // also need the geodesic itself for tangents at samples
  GeodesicCurve curve = integrate_geodesic(m, params, x0, v0, t1, steps);

  // sample indices
  std::vector<int> idx;
  for (int s = 1; s <= samples; ++s)
    idx.push_back(static_cast<int>(static_cast<double>(s) * steps / samples));

  // rows of the least-squares system: P_k (ζ_hom + Σ a_j ζ_j) = 0
  Eigen::MatrixXd Amat(static_cast<int>(idx.size()) * n, mdim);
  Eigen::VectorXd rvec(static_cast<int>(idx.size()) * n);
  double scale = 1.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    int t = idx[k];
    Eigen::VectorXd tang = curve.vs[t];
    double tn = tang.norm();
    if (tn == 0) throw Error("degenerate tangent along geodesic");
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - (tang * tang.transpose()) / (tn * tn);
    Eigen::VectorXd zh = rows[t][0].zeta;
    scale = std::max(scale, zh.norm());
    rvec.segment(static_cast<int>(k) * n, n) = P * zh;
    for (int j = 0; j < mdim; ++j) {
      Eigen::VectorXd zj = rows[t][j + 1].zeta;
      Amat.block(static_cast<int>(k) * n, j, n, 1) = P * zj;
      scale = std::max(scale, zj.norm());
    }
  }

  Eigen::VectorXd sol = Amat.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-rvec);
  double resid = (Amat * sol + rvec).norm() /
                 (std::sqrt(static_cast<double>(idx.size() * n)) * scale);

  TransportHomogeneityResult out;
  out.residual = resid;
  out.coefficients = sol;
  if (resid < 1e-9)
    out.verdict = Feasibility::feasible;
  else if (resid > 1e-6)
    out.verdict = Feasibility::infeasible;
  else
    out.verdict = Feasibility::undecided;
  return out;
}

}  // namespace pgeo
