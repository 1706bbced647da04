#include "platelab/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <tuple>

namespace platelab {

namespace {

struct Triplets {
  std::int64_t rows = 0, cols = 0;
  std::vector<std::int64_t> r, c;
  std::vector<double> v;
  void add(std::int64_t i, std::int64_t j, double x) {
    r.push_back(i);
    c.push_back(j);
    v.push_back(x);
  }
};

// CSR with sorted columns, duplicates summed.
struct Csr {
  std::int64_t rows = 0, cols = 0;
  std::vector<std::int64_t> ptr, idx;
  std::vector<double> val;
};

Csr compress(const Triplets& t) {
  std::vector<std::size_t> order(t.r.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(t.r[a], t.c[a]) < std::tie(t.r[b], t.c[b]);
  });
  Csr m;
  m.rows = t.rows;
  m.cols = t.cols;
  m.ptr.assign(t.rows + 1, 0);
  for (std::size_t p = 0; p < order.size();) {
    std::size_t q = p;
    double sum = 0.0;
    while (q < order.size() && t.r[order[q]] == t.r[order[p]] && t.c[order[q]] == t.c[order[p]])
      sum += t.v[order[q++]];
    m.idx.push_back(t.c[order[p]]);
    m.val.push_back(sum);
    ++m.ptr[t.r[order[p]] + 1];
    p = q;
  }
  for (std::int64_t i = 0; i < m.rows; ++i) m.ptr[i + 1] += m.ptr[i];
  return m;
}

Csr transpose(const Csr& a) {
  Csr t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.ptr.assign(t.rows + 1, 0);
  for (std::int64_t j : a.idx) ++t.ptr[j + 1];
  for (std::int64_t i = 0; i < t.rows; ++i) t.ptr[i + 1] += t.ptr[i];
  t.idx.assign(a.idx.size(), 0);
  t.val.assign(a.val.size(), 0.0);
  std::vector<std::int64_t> next(t.ptr.begin(), t.ptr.end() - 1);
  for (std::int64_t i = 0; i < a.rows; ++i)
    for (std::int64_t p = a.ptr[i]; p < a.ptr[i + 1]; ++p) {
      std::int64_t dst = next[a.idx[p]]++;
      t.idx[dst] = i;
      t.val[dst] = a.val[p];
    }
  return t;
}

// C = A * B, Gustavson with a dense accumulator per row.
Csr multiply(const Csr& a, const Csr& b) {
  Csr c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.ptr.assign(c.rows + 1, 0);
  std::vector<double> acc(b.cols, 0.0);
  std::vector<std::int64_t> mark(b.cols, -1);
  std::vector<std::int64_t> live;
  for (std::int64_t i = 0; i < a.rows; ++i) {
    live.clear();
    for (std::int64_t p = a.ptr[i]; p < a.ptr[i + 1]; ++p) {
      std::int64_t k = a.idx[p];
      double av = a.val[p];
      for (std::int64_t q = b.ptr[k]; q < b.ptr[k + 1]; ++q) {
        std::int64_t j = b.idx[q];
        if (mark[j] != i) {
          mark[j] = i;
          acc[j] = 0.0;
          live.push_back(j);
        }
        acc[j] += av * b.val[q];
      }
    }
    std::sort(live.begin(), live.end());
    for (std::int64_t j : live) {
      c.idx.push_back(j);
      c.val.push_back(acc[j]);
    }
    c.ptr[i + 1] = std::int64_t(c.idx.size());
  }
  return c;
}

struct StencilSink {
  Triplets* out;
  std::int64_t row;
  // resolve a lattice coordinate (possibly off-lattice) to a column, or -1
  const std::function<std::int64_t(int, int)>* resolve;
  void add(int qx, int qy, double w) {
    if (w == 0.0) return;
    std::int64_t col = (*resolve)(qx, qy);
    if (col >= 0) out->add(row, col, w);
  }
};

// Emits one row of the -div(T grad .) stencil centered at lattice (cx, cy).
// Diagonal part samples T at edge midpoints; the cross part uses node-sampled
// off-diagonal entries with antisymmetric central differences, which keeps
// the assembled matrix exactly symmetric for any full tensor.
void emit_row(const GridDomain& d, const TensorField& f, int cx, int cy, StencilSink& sink,
              bool spd_check) {
  double h = d.h;
  double inv_h2 = 1.0 / (h * h);
  Point p = {d.origin[0] + cx * h, d.dim == 2 ? d.origin[1] + cy * h : 0.0};
  double diag = 0.0;
  for (int a = 0; a < d.dim; ++a) {
    for (int s = -1; s <= 1; s += 2) {
      Point mid = p;
      mid[a] += 0.5 * s * h;
      auto t = f.value(mid);
      if (spd_check) {
        bool spd = d.dim == 1 ? t[0] > 0.0 : (t[0] > 0.0 && t[0] * t[3] - t[1] * t[1] > 0.0);
        if (!spd) throw AssemblyError("tensor sample at edge midpoint is not positive definite");
      }
      double taa = t[a * 2 + a];
      diag += taa * inv_h2;
      sink.add(cx + (a == 0 ? s : 0), cy + (a == 1 ? s : 0), -taa * inv_h2);
    }
  }
  sink.add(cx, cy, diag);
  if (d.dim == 2 && f.kind == TensorKind::rotated) {
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2) {
        Point px = {p[0] + sx * h, p[1]};
        Point py = {p[0], p[1] + sy * h};
        double t12 = f.value(px)[1] + f.value(py)[1];
        sink.add(cx + sx, cy + sy, -sx * sy * t12 * 0.25 * inv_h2);
      }
  }
}

SparseSymMatrix from_csr(Csr&& m, double defect) {
  SparseSymMatrix a;
  a.order = m.rows;
  a.row_offsets = std::move(m.ptr);
  a.col_indices = std::move(m.idx);
  a.values = std::move(m.val);
  a.symmetry_defect = defect;
  return a;
}

}  // namespace

void SparseSymMatrix::matvec(const double* x, double* y) const {
  for (std::int64_t i = 0; i < order; ++i) {
    double s = 0.0;
    for (std::int64_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
      s += values[p] * x[col_indices[p]];
    y[i] = s;
  }
}

std::vector<double> SparseSymMatrix::matvec(const std::vector<double>& x) const {
  if (std::int64_t(x.size()) != order) throw Error("matvec: length mismatch");
  std::vector<double> y(order);
  matvec(x.data(), y.data());
  return y;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(order, 0.0);
  for (std::int64_t i = 0; i < order; ++i)
    for (std::int64_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
      if (col_indices[p] == i) d[i] = values[p];
  return d;
}

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SparseSymMatrix assemble_L(const GridDomain& domain, const TensorField& field) {
  std::int64_t n = std::int64_t(domain.interior_count());
  Triplets t;
  t.rows = t.cols = n;
  std::function<std::int64_t(int, int)> resolve = [&](int qx, int qy) -> std::int64_t {
    if (qx < 0 || qx >= domain.nx || qy < 0 || qy >= domain.ny) return -1;
    return domain.interior_index[std::int64_t(qy) * domain.nx + qx];
  };
  StencilSink sink{&t, 0, &resolve};
  for (std::size_t i = 0; i < domain.interior_count(); ++i) {
    std::int64_t l = domain.interior_nodes[i];
    sink.row = std::int64_t(i);
    emit_row(domain, field, int(l % domain.nx), int(l / domain.nx), sink, true);
  }
  return from_csr(compress(t), 0.0);
}

SparseSymMatrix assemble_clamped(const GridDomain& domain, const TensorField& field,
                                 const AssembleOptions& options) {
  std::int64_t n = std::int64_t(domain.interior_count());
  // index interior + boundary nodes for the intermediate field w = L_h u
  std::vector<std::int64_t> ib_index(domain.lattice_size(), -1);
  std::vector<std::int64_t> ib_nodes;
  for (std::int64_t l = 0; l < domain.lattice_size(); ++l)
    if (domain.kind[l] != NodeKind::exterior) {
      ib_index[l] = std::int64_t(ib_nodes.size());
      ib_nodes.push_back(l);
    }
  std::int64_t nib = std::int64_t(ib_nodes.size());

  auto kind_at = [&](int qx, int qy) -> NodeKind {
    if (qx < 0 || qx >= domain.nx || qy < 0 || qy >= domain.ny) return NodeKind::exterior;
    return domain.kind[std::int64_t(qy) * domain.nx + qx];
  };

  // First application: rows over interior+boundary, ghost values mirrored
  // through the stencil center (u(c+d) := u(c-d)); boundary values are 0.
  Triplets wt;
  wt.rows = nib;
  wt.cols = n;
  int cx = 0, cy = 0;
  std::function<std::int64_t(int, int)> resolve_w = [&](int qx, int qy) -> std::int64_t {
    NodeKind k = kind_at(qx, qy);
    if (k == NodeKind::interior) return domain.interior_index[std::int64_t(qy) * domain.nx + qx];
    if (k == NodeKind::boundary) return -1;
    int rx = 2 * cx - qx, ry = 2 * cy - qy;
    if (kind_at(rx, ry) == NodeKind::interior)
      return domain.interior_index[std::int64_t(ry) * domain.nx + rx];
    return -1;
  };
  StencilSink sink_w{&wt, 0, &resolve_w};
  for (std::int64_t r = 0; r < nib; ++r) {
    std::int64_t l = ib_nodes[r];
    cx = int(l % domain.nx);
    cy = int(l / domain.nx);
    sink_w.row = r;
    emit_row(domain, field, cx, cy, sink_w, false);
  }

  // Second application: rows over interior, consuming w on interior+boundary.
  Triplets kt;
  kt.rows = n;
  kt.cols = nib;
  std::function<std::int64_t(int, int)> resolve_k = [&](int qx, int qy) -> std::int64_t {
    if (qx < 0 || qx >= domain.nx || qy < 0 || qy >= domain.ny) return -1;
    return ib_index[std::int64_t(qy) * domain.nx + qx];
  };
  StencilSink sink_k{&kt, 0, &resolve_k};
  for (std::size_t i = 0; i < domain.interior_count(); ++i) {
    std::int64_t l = domain.interior_nodes[i];
    sink_k.row = std::int64_t(i);
    emit_row(domain, field, int(l % domain.nx), int(l / domain.nx), sink_k, false);
  }

  Csr prod = multiply(compress(kt), compress(wt));
  Csr prod_t = transpose(prod);

  // Symmetrize over the merged pattern and record the max-norm defect.
  double amax = 0.0;
  for (double v : prod.val) amax = std::max(amax, std::abs(v));
  double dmax = 0.0;
  Csr sym;
  sym.rows = sym.cols = n;
  sym.ptr.assign(n + 1, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t p = prod.ptr[i], pe = prod.ptr[i + 1];
    std::int64_t q = prod_t.ptr[i], qe = prod_t.ptr[i + 1];
    while (p < pe || q < qe) {
      std::int64_t j;
      double a = 0.0, b = 0.0;
      if (p < pe && (q >= qe || prod.idx[p] < prod_t.idx[q])) {
        j = prod.idx[p];
        a = prod.val[p++];
      } else if (q < qe && (p >= pe || prod_t.idx[q] < prod.idx[p])) {
        j = prod_t.idx[q];
        b = prod_t.val[q++];
      } else {
        j = prod.idx[p];
        a = prod.val[p++];
        b = prod_t.val[q++];
      }
      dmax = std::max(dmax, std::abs(a - b));
      sym.idx.push_back(j);
      sym.val.push_back(0.5 * (a + b));
    }
    sym.ptr[i + 1] = std::int64_t(sym.idx.size());
  }
  double defect = amax > 0.0 ? dmax / amax : 0.0;
  if (options.strict && defect > 1e-6)
    throw AssemblyError("clamped assembly symmetry defect " + std::to_string(defect) +
                        " exceeds 1e-6 in strict mode");
  return from_csr(std::move(sym), defect);
}

void write_matrix_market(const SparseSymMatrix& A, std::ostream& out) {
  std::int64_t nnz_lower = 0;
  for (std::int64_t i = 0; i < A.order; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      if (A.col_indices[p] <= i) ++nnz_lower;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << A.order << " " << A.order << " " << nnz_lower << "\n";
  char buf[64];
  for (std::int64_t i = 0; i < A.order; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
      std::int64_t j = A.col_indices[p];
      if (j > i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", A.values[p]);
      out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
    }
}

void write_matrix_market(const SparseSymMatrix& A, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_matrix_market(A, f);
  if (!f) throw Error("write failed: " + path);
}

}  // namespace platelab
