#include "platelab/functionals.hpp"

#include <cmath>
#include <string>

#include "platelab/numerics.hpp"

namespace platelab {

namespace {

// Per-node tensor samples and tr(nabla T), reused by every functional.
struct NodeData {
  std::vector<std::array<double, 4>> T;
  std::vector<Point> trT;
  std::vector<Point> pos;
};

NodeData sample_nodes(const GridDomain& d, const TensorField& f) {
  NodeData nd;
  std::size_t n = d.interior_count();
  nd.T.resize(n);
  nd.trT.resize(n);
  nd.pos.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p = d.interior_point(i);
    nd.pos[i] = p;
    nd.T[i] = f.value(p);
    nd.trT[i] = trace_nabla_T(f, p);
  }
  return nd;
}

// (T grad u)_a at each node from cached gradients.
std::array<std::vector<double>, 2> tensor_grad(const NodeData& nd,
                                               const std::array<std::vector<double>, 2>& g,
                                               int dim) {
  std::size_t n = g[0].size();
  std::array<std::vector<double>, 2> out;
  out[0].assign(n, 0.0);
  out[1].assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (dim == 1) {
      out[0][i] = nd.T[i][0] * g[0][i];
    } else {
      out[0][i] = nd.T[i][0] * g[0][i] + nd.T[i][1] * g[1][i];
      out[1][i] = nd.T[i][1] * g[0][i] + nd.T[i][3] * g[1][i];
    }
  }
  return out;
}

void check_pairs(const EigenSystem& sys, int k, const GridDomain& domain) {
  if (k < 1) throw Error("functionals: k must be positive");
  if (std::size_t(k) > sys.eigenvalues.size()) throw Error("functionals: k exceeds solved pairs");
  if (!sys.eigenvectors.empty() && sys.eigenvectors[0].size() != domain.interior_count())
    throw Error("functionals: eigenvector length does not match the domain");
}

}  // namespace

double inner(const std::vector<double>& u, const std::vector<double>& v,
             const GridDomain& domain) {
  if (u.size() != domain.interior_count() || v.size() != domain.interior_count())
    throw Error("inner: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return domain.cell_weight() * s;
}

std::array<std::vector<double>, 2> gradient(const std::vector<double>& u,
                                            const GridDomain& domain) {
  if (u.size() != domain.interior_count()) throw Error("gradient: length mismatch");
  std::vector<double> full(domain.lattice_size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) full[domain.interior_nodes[i]] = u[i];
  std::array<std::vector<double>, 2> g;
  g[0].assign(u.size(), 0.0);
  g[1].assign(u.size(), 0.0);
  double inv2h = 1.0 / (2.0 * domain.h);
  std::int64_t offs[2] = {1, domain.nx};
  for (int a = 0; a < domain.dim; ++a)
    for (std::size_t i = 0; i < u.size(); ++i) {
      std::int64_t l = domain.interior_nodes[i];
      g[a][i] = (full[l + offs[a]] - full[l - offs[a]]) * inv2h;
    }
  return g;
}

std::vector<double> apply_L(const SparseSymMatrix& K, const std::vector<double>& u) {
  std::vector<double> out = K.matvec(u);
  for (double& v : out) v = -v;
  return out;
}

std::vector<double> apply_L_free(const GridDomain& domain, const TensorField& field,
                                 const ScalarField& f) {
  std::size_t n = domain.interior_count();
  std::vector<double> out(n, 0.0);
  double h = domain.h;
  double inv_h2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    Point p = domain.interior_point(i);
    double fc = f(p);
    double acc = 0.0;
    for (int a = 0; a < domain.dim; ++a)
      for (int s = -1; s <= 1; s += 2) {
        Point mid = p, q = p;
        mid[a] += 0.5 * s * h;
        q[a] += s * h;
        acc += field.value(mid)[a * 2 + a] * (f(q) - fc) * inv_h2;
      }
    if (domain.dim == 2 && field.kind == TensorKind::rotated) {
      for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2) {
          Point px = {p[0] + sx * h, p[1]};
          Point py = {p[0], p[1] + sy * h};
          double t12 = field.value(px)[1] + field.value(py)[1];
          Point q = {p[0] + sx * h, p[1] + sy * h};
          acc += sx * sy * t12 * 0.25 * inv_h2 * f(q);
        }
    }
    out[i] = acc;
  }
  return out;
}

FunctionalSet theorem1_quantities(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const SparseSymMatrix& K,
                                  const GeometricConstants& consts, int k) {
  check_pairs(sys, k, domain);
  if (consts.S0 != 0.0 || consts.H0 != 0.0)
    throw Error("theorem1_quantities: curved constants require external data; "
                "only the constants-level evaluators support them");
  NodeData nd = sample_nodes(domain, field);
  std::size_t n = domain.interior_count();
  FunctionalSet fs;
  for (int i = 0; i < k; ++i) {
    const auto& u = sys.eigenvectors[i];
    std::vector<double> Lu = apply_L(K, u);
    auto gu = gradient(u, domain);
    auto gLu = gradient(Lu, domain);
    auto Tgu = tensor_grad(nd, gu, domain.dim);
    auto TgLu = tensor_grad(nd, gLu, domain.dim);
    double t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0, t6 = 0, lhsw = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const Point& I = nd.pos[q];
      const Point& tr = nd.trT[q];
      double trI = tr[0] * I[0] + tr[1] * I[1];
      double tr2 = tr[0] * tr[0] + tr[1] * tr[1];
      t1 += u[q] * Lu[q] * trI;
      t2 += u[q] * (TgLu[0][q] * I[0] + TgLu[1][q] * I[1]);
      t3 += u[q] * u[q] * tr2;
      t4 += u[q] * (Tgu[0][q] * tr[0] + Tgu[1][q] * tr[1]);
      t5 += Tgu[0][q] * Tgu[0][q] + Tgu[1][q] * Tgu[1][q];
      t6 += Lu[q] * (Tgu[0][q] * I[0] + Tgu[1][q] * I[1]);
      double trT = domain.dim == 1 ? nd.T[q][0] : nd.T[q][0] + nd.T[q][3];
      lhsw += u[q] * u[q] * trT;
    }
    double wq = domain.cell_weight();
    double Ai = wq * (2 * t1 + 2 * t2 + t3 + 4 * t4 + 4 * t5 + 2 * t6);
    double Bi = wq * (t5 + t4 + 0.25 * t3);
    if (Bi < -1e-9)
      throw Error("theorem1_quantities: B is a complete square and came out negative");
    fs.lambda.push_back(sys.eigenvalues[i]);
    fs.A.push_back(Ai);
    fs.B.push_back(Bi);
    fs.lhs_weight.push_back(wq * lhsw);
    fs.Lu.push_back(std::move(Lu));
    fs.grad_u.push_back(std::move(gu));
  }
  return fs;
}

FunctionalSet theorem2_quantities(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const SparseSymMatrix& K,
                                  const GeometricConstants& consts, int k) {
  check_pairs(sys, k, domain);
  NodeData nd = sample_nodes(domain, field);
  std::size_t n = domain.interior_count();
  double mn = double(consts.m - consts.n);
  FunctionalSet fs;
  fs.dimensional_audit = true;
  for (int i = 0; i < k; ++i) {
    const auto& u = sys.eigenvectors[i];
    double lam = sys.eigenvalues[i];
    std::vector<double> Lu = apply_L(K, u);
    auto Tgu = tensor_grad(nd, gradient(u, domain), domain.dim);
    auto TgLu = tensor_grad(nd, gradient(Lu, domain), domain.dim);
    double s_gu = 0, s_gLu = 0, lhsw = 0;
    for (std::size_t q = 0; q < n; ++q) {
      s_gu += Tgu[0][q] * Tgu[0][q] + Tgu[1][q] * Tgu[1][q];
      s_gLu += TgLu[0][q] * TgLu[0][q] + TgLu[1][q] * TgLu[1][q];
      double trT = domain.dim == 1 ? nd.T[q][0] : nd.T[q][0] + nd.T[q][3];
      lhsw += u[q] * u[q] * trT;
    }
    double nTgu = std::sqrt(domain.cell_weight() * s_gu);
    double nTgLu = std::sqrt(domain.cell_weight() * s_gLu);
    double sq = std::sqrt(lam);
    double Ci = 2 * (std::sqrt(mn) * consts.S0 * consts.T_star + consts.T0) * consts.I0 * sq +
                consts.I0 * nTgLu + mn * consts.S0 * consts.S0 * consts.T_star * consts.T_star +
                consts.T0 * consts.T0 + 4 * consts.T0 * nTgu + 4 * nTgu +
                2 * lam * consts.I0 * nTgu;
    double Di = nTgu + consts.T0 * nTgu +
                0.25 * (mn * consts.S0 * consts.S0 * consts.T_star * consts.T_star +
                        consts.T0 * consts.T0);
    fs.lambda.push_back(lam);
    fs.lhs_weight.push_back(domain.cell_weight() * lhsw);
    fs.C.push_back(Ci);
    fs.D.push_back(Di);
  }
  return fs;
}

FunctionalSet theorem3_quantities(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const GeometricConstants& consts,
                                  int k) {
  check_pairs(sys, k, domain);
  if (field.kind != TensorKind::identity)
    throw Error("theorem3_quantities: only the identity tensor branch is defined");
  double n_dim = double(consts.n);
  double h02 = consts.H0 * consts.H0;
  FunctionalSet fs;
  for (int i = 0; i < k; ++i) {
    auto gu = gradient(sys.eigenvectors[i], domain);
    double s = 0.0;
    for (std::size_t q = 0; q < gu[0].size(); ++q)
      s += gu[0][q] * gu[0][q] + gu[1][q] * gu[1][q];
    double gnorm2 = domain.cell_weight() * s;
    double lam = sys.eigenvalues[i];
    double sq = std::sqrt(lam);
    fs.lambda.push_back(lam);
    fs.E_exact.push_back(4.0 * gnorm2);  // curvature terms vanish on flat grids
    fs.E_bound.push_back(2.0 * n_dim * consts.H0 * consts.I0 * sq + n_dim * n_dim * h02 +
                         4.0 * sq);
    fs.F_exact.push_back(gnorm2);
    fs.F_bound.push_back(sq + 0.25 * n_dim * n_dim * h02);
  }
  return fs;
}

FunctionalSet make_functional_set(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const SparseSymMatrix& K,
                                  const GeometricConstants& consts, int k) {
  FunctionalSet fs = theorem2_quantities(sys, domain, field, K, consts, k);
  if (consts.S0 == 0.0 && consts.H0 == 0.0) {
    FunctionalSet t1 = theorem1_quantities(sys, domain, field, K, consts, k);
    fs.A = std::move(t1.A);
    fs.B = std::move(t1.B);
    fs.Lu = std::move(t1.Lu);
    fs.grad_u = std::move(t1.grad_u);
  }
  if (field.kind == TensorKind::identity) {
    FunctionalSet t3 = theorem3_quantities(sys, domain, field, consts, k);
    fs.E_exact = std::move(t3.E_exact);
    fs.E_bound = std::move(t3.E_bound);
    fs.F_exact = std::move(t3.F_exact);
    fs.F_bound = std::move(t3.F_bound);
  }
  return fs;
}

TrialSet trial_functions(const EigenSystem& sys, const GridDomain& domain,
                         const TensorField& field, const SparseSymMatrix& K, int k,
                         int h_axis) {
  if (sys.eigenvalues.size() < 2) throw Error("trial_functions: at least 2 eigenpairs needed");
  check_pairs(sys, k, domain);
  if (h_axis < 0 || h_axis >= domain.dim) throw Error("trial_functions: bad coordinate axis");

  std::size_t n = domain.interior_count();
  NodeData nd = sample_nodes(domain, field);
  TrialSet ts;
  ts.k = k;
  ts.h_axis = h_axis;
  ts.h_field.resize(n);
  for (std::size_t i = 0; i < n; ++i) ts.h_field[i] = nd.pos[i][h_axis];
  std::vector<double> Lh =
      apply_L_free(domain, field, [h_axis](const Point& p) { return p[h_axis]; });

  // T(grad h, grad f) for h = x_r is sum_b T_rb d_b f at each node.
  auto t_h_dot = [&](const std::array<std::vector<double>, 2>& g) {
    std::vector<double> out(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      double acc = nd.T[q][h_axis * 2 + 0] * g[0][q];
      if (domain.dim == 2) acc += nd.T[q][h_axis * 2 + 1] * g[1][q];
      out[q] = acc;
    }
    return out;
  };

  std::vector<std::vector<double>> q_fields(k);
  for (int i = 0; i < k; ++i) {
    const auto& u = sys.eigenvectors[i];
    std::vector<double> Lu = apply_L(K, u);
    auto gu = gradient(u, domain);
    auto gLu = gradient(Lu, domain);
    std::vector<double> tgu = t_h_dot(gu);
    std::vector<double> tgLu = t_h_dot(gLu);

    std::vector<double> uLh(n), tmp(n);
    for (std::size_t q = 0; q < n; ++q) uLh[q] = u[q] * Lh[q];
    std::vector<double> L_uLh = apply_L(K, uLh);
    std::vector<double> L_tgu = apply_L(K, tgu);
    std::vector<double> p(n);
    for (std::size_t q = 0; q < n; ++q)
      p[q] = Lh[q] * Lu[q] + 2.0 * tgLu[q] + L_uLh[q] + 2.0 * L_tgu[q];

    std::vector<double> hu(n);
    for (std::size_t q = 0; q < n; ++q) hu[q] = ts.h_field[q] * u[q];
    ts.w.push_back(inner(hu, p, domain));
    for (std::size_t q = 0; q < n; ++q) tmp[q] = u[q] * u[q];
    std::vector<double> trr(n);
    for (std::size_t q = 0; q < n; ++q) trr[q] = nd.T[q][h_axis * 2 + h_axis];
    ts.v.push_back(inner(tmp, trr, domain));
    std::vector<double> qf(n);
    for (std::size_t q = 0; q < n; ++q) qf[q] = tgu[q] + 0.5 * u[q] * Lh[q];
    ts.tnorm2.push_back(inner(qf, qf, domain));
    q_fields[i] = std::move(qf);
    ts.p.push_back(std::move(p));
  }

  ts.a.assign(std::size_t(k) * k, 0.0);
  ts.r.assign(std::size_t(k) * k, 0.0);
  ts.b.assign(std::size_t(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    std::vector<double> hu(n);
    for (std::size_t q = 0; q < n; ++q) hu[q] = ts.h_field[q] * sys.eigenvectors[i][q];
    for (int j = 0; j < k; ++j) {
      ts.a[i * k + j] = inner(hu, sys.eigenvectors[j], domain);
      ts.r[i * k + j] = inner(ts.p[i], sys.eigenvectors[j], domain);
      ts.b[i * k + j] = inner(sys.eigenvectors[j], q_fields[i], domain);
    }
  }

  for (int i = 0; i < k; ++i) {
    std::vector<double> phi(n);
    for (std::size_t q = 0; q < n; ++q) phi[q] = ts.h_field[q] * sys.eigenvectors[i][q];
    for (int j = 0; j < k; ++j) axpy(-ts.a[i * k + j], sys.eigenvectors[j], phi);
    // one explicit re-projection pass pins <phi, u_r> at rounding level
    for (int j = 0; j < k; ++j) {
      double c = inner(phi, sys.eigenvectors[j], domain);
      axpy(-c, sys.eigenvectors[j], phi);
    }
    ts.phi.push_back(std::move(phi));
  }
  return ts;
}

PropositionSlacks proposition_check(const TrialSet& trial, const EigenSystem& sys,
                                    double delta) {
  if (!(delta > 0.0)) throw Error("proposition_check: delta must be positive");
  if (sys.eigenvalues.size() < std::size_t(trial.k) + 1)
    throw Error("proposition_check: lambda_{k+1} not available");
  double lamk1 = sys.eigenvalues[trial.k];

  double sum_g2w = 0, sum_gp2 = 0, sum_g2v = 0, sum_gt = 0;
  for (int i = 0; i < trial.k; ++i) {
    double gap = lamk1 - sys.eigenvalues[i];
    double pnorm2 = 0.0;
    for (double x : trial.p[i]) pnorm2 += x * x;
    pnorm2 *= sys.weight;
    sum_g2w += gap * gap * trial.w[i];
    sum_gp2 += gap * pnorm2;
    sum_g2v += gap * gap * trial.v[i];
    sum_gt += gap * trial.tnorm2[i];
  }

  PropositionSlacks out;
  out.delta = delta;
  out.lhs = {sum_g2w, sum_g2v, sum_g2v};
  out.rhs = {sum_gp2, delta * sum_g2w + sum_gt / delta, delta * sum_gp2 + sum_gt / delta};
  for (int j = 0; j < 3; ++j) out.slack[j] = out.rhs[j] - out.lhs[j];
  return out;
}

}  // namespace platelab
