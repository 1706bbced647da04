#include "platelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace platelab {

namespace {

void index_interior(GridDomain& d) {
  d.interior_index.assign(d.lattice_size(), -1);
  d.interior_nodes.clear();
  for (std::int64_t l = 0; l < d.lattice_size(); ++l) {
    if (d.kind[l] == NodeKind::interior) {
      d.interior_index[l] = std::int64_t(d.interior_nodes.size());
      d.interior_nodes.push_back(l);
    }
  }
  if (d.interior_nodes.size() < 4)
    throw DomainError("domain too coarse: fewer than 4 interior nodes");
}

}  // namespace

double GridDomain::cell_weight() const {
  return dim == 1 ? h : h * h;
}

GridDomain GridDomain::translated(const Point& shift) const {
  GridDomain out = *this;
  out.origin[0] += shift[0];
  out.origin[1] += shift[1];
  return out;
}

GridDomain build_interval(double length, int N) {
  if (!(length > 0.0)) throw DomainError("interval length must be positive");
  if (N < 8) throw DomainError("interval too coarse: N >= 8 required");
  GridDomain d;
  d.dim = 1;
  d.h = length / N;
  d.nx = N + 1;
  d.ny = 1;
  d.origin = {0.0, 0.0};
  d.kind.assign(d.nx, NodeKind::interior);
  d.kind[0] = NodeKind::boundary;
  d.kind[N] = NodeKind::boundary;
  index_interior(d);
  return d;
}

GridDomain build_rectangle(double Lx, double Ly, int Nx, int Ny) {
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw DomainError("rectangle sides must be positive");
  if (Nx < 8 || Ny < 8) throw DomainError("rectangle too coarse: Nx, Ny >= 8 required");
  double h = Lx / Nx;
  if (std::abs(Ly / Ny - h) > 1e-12 * h)
    throw DomainError("rectangle spacing mismatch: Lx/Nx must equal Ly/Ny");
  GridDomain d;
  d.dim = 2;
  d.h = h;
  d.nx = Nx + 1;
  d.ny = Ny + 1;
  d.origin = {0.0, 0.0};
  d.kind.assign(d.lattice_size(), NodeKind::boundary);
  for (int iy = 1; iy < Ny; ++iy)
    for (int ix = 1; ix < Nx; ++ix)
      d.kind[std::int64_t(iy) * d.nx + ix] = NodeKind::interior;
  index_interior(d);
  return d;
}

GridDomain build_disk(double R, int N) {
  if (!(R > 0.0)) throw DomainError("disk radius must be positive");
  if (N < 16) throw DomainError("disk too coarse: N >= 16 required");
  GridDomain d;
  d.dim = 2;
  d.h = 2.0 * R / N;
  d.nx = N + 1;
  d.ny = N + 1;
  d.origin = {-R, -R};
  d.kind.assign(d.lattice_size(), NodeKind::exterior);
  for (int iy = 0; iy <= N; ++iy)
    for (int ix = 0; ix <= N; ++ix) {
      double x = -R + ix * d.h, y = -R + iy * d.h;
      if (std::hypot(x, y) < R - d.h / 2)
        d.kind[std::int64_t(iy) * d.nx + ix] = NodeKind::interior;
    }
  // Boundary ring: every non-interior node with an interior 4-neighbor. This
  // guarantees interior nodes never see exterior values through the 5-point
  // stencil.
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  for (int iy = 0; iy <= N; ++iy)
    for (int ix = 0; ix <= N; ++ix) {
      std::int64_t l = std::int64_t(iy) * d.nx + ix;
      if (d.kind[l] == NodeKind::interior) continue;
      for (int s = 0; s < 4; ++s) {
        int jx = ix + dx[s], jy = iy + dy[s];
        if (jx < 0 || jx > N || jy < 0 || jy > N) continue;
        if (d.kind[std::int64_t(jy) * d.nx + jx] == NodeKind::interior) {
          d.kind[l] = NodeKind::boundary;
          break;
        }
      }
    }
  index_interior(d);
  // Connectivity over interior 4-neighbors.
  std::vector<char> seen(d.interior_count(), 0);
  std::queue<std::int64_t> q;
  q.push(d.interior_nodes[0]);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    std::int64_t l = q.front();
    q.pop();
    int ix = int(l % d.nx), iy = int(l / d.nx);
    for (int s = 0; s < 4; ++s) {
      int jx = ix + dx[s], jy = iy + dy[s];
      if (jx < 0 || jx > N || jy < 0 || jy > N) continue;
      std::int64_t m = std::int64_t(jy) * d.nx + jx;
      std::int64_t u = d.interior_index[m];
      if (u >= 0 && !seen[u]) {
        seen[u] = 1;
        ++reached;
        q.push(m);
      }
    }
  }
  if (reached != d.interior_count()) throw DomainError("disk interior is disconnected");
  return d;
}

std::array<double, 4> TensorField::value(const Point& p) const {
  switch (kind) {
    case TensorKind::identity:
      return dim == 1 ? std::array<double, 4>{1.0, 0.0, 0.0, 0.0}
                      : std::array<double, 4>{1.0, 0.0, 0.0, 1.0};
    case TensorKind::diagonal: {
      double av = a(p);
      double bv = dim == 2 ? b(p) : 0.0;
      return {av, 0.0, 0.0, bv};
    }
    case TensorKind::rotated: {
      double av = a(p), bv = b(p), th = theta(p);
      double c = std::cos(th), s = std::sin(th);
      double t11 = av * c * c + bv * s * s;
      double t22 = av * s * s + bv * c * c;
      double t12 = (av - bv) * c * s;
      return {t11, t12, t12, t22};
    }
  }
  return {1.0, 0.0, 0.0, 1.0};
}

TensorField identity_field(int dim) {
  TensorField f;
  f.kind = TensorKind::identity;
  f.dim = dim;
  return f;
}

TensorField diagonal_field(ScalarField a, ScalarField b, int dim, double fd_step) {
  TensorField f;
  f.kind = TensorKind::diagonal;
  f.dim = dim;
  f.fd_step = fd_step;
  f.a = std::move(a);
  f.b = std::move(b);
  return f;
}

TensorField rotated_field(ScalarField theta, ScalarField a, ScalarField b, double fd_step) {
  TensorField f;
  f.kind = TensorKind::rotated;
  f.dim = 2;
  f.fd_step = fd_step;
  f.theta = std::move(theta);
  f.a = std::move(a);
  f.b = std::move(b);
  return f;
}

Point trace_nabla_T(const TensorField& field, const Point& p) {
  Point out{0.0, 0.0};
  double s = field.fd_step;
  for (int j = 0; j < field.dim; ++j) {
    double acc = 0.0;
    for (int i = 0; i < field.dim; ++i) {
      Point pp = p, pm = p;
      pp[i] += s;
      pm[i] -= s;
      acc += (field.entry(pp, i, j) - field.entry(pm, i, j)) / (2.0 * s);
    }
    out[j] = acc;
  }
  return out;
}

GeometricConstants geometric_constants(const GridDomain& domain, const TensorField& field,
                                       const ConstantOverrides& overrides) {
  for (const auto& v : {overrides.S0, overrides.T_star, overrides.T0, overrides.I0, overrides.H0})
    if (v && *v < 0.0) throw DomainError("geometric constant override must be nonnegative");
  GeometricConstants c;
  c.n = domain.dim;
  c.m = overrides.m.value_or(domain.dim);
  if (c.m < c.n) throw DomainError("ambient dimension m must be >= n");
  double I0 = 0.0, Tst = 0.0, T0 = 0.0;
  for (std::int64_t l = 0; l < domain.lattice_size(); ++l) {
    if (domain.kind[l] == NodeKind::exterior) continue;
    Point p = domain.node_point(l);
    I0 = std::max(I0, std::hypot(p[0], p[1]));
    auto t = field.value(p);
    if (domain.dim == 1) {
      Tst = std::max(Tst, std::abs(t[0]));
    } else {
      // spectral norm of the symmetric 2x2 sample
      double mean = 0.5 * (t[0] + t[3]);
      double rad = std::hypot(0.5 * (t[0] - t[3]), t[1]);
      Tst = std::max(Tst, std::abs(mean) + rad);
    }
    Point tr = trace_nabla_T(field, p);
    T0 = std::max(T0, std::hypot(tr[0], tr[1]));
  }
  c.I0 = overrides.I0.value_or(I0);
  c.T_star = overrides.T_star.value_or(Tst);
  c.T0 = overrides.T0.value_or(T0);
  c.S0 = overrides.S0.value_or(0.0);
  c.H0 = overrides.H0.value_or(0.0);
  return c;
}

}  // namespace platelab
