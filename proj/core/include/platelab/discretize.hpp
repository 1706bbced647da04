#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "platelab/geometry.hpp"

namespace platelab {

// Symmetric sparse matrix over interior unknowns, CSR with both triangles
// stored and columns sorted within each row.
struct SparseSymMatrix {
  std::int64_t order = 0;
  std::vector<std::int64_t> row_offsets;  // order + 1
  std::vector<std::int64_t> col_indices;
  std::vector<double> values;
  // max-norm relative asymmetry recorded at assembly, before symmetrization
  double symmetry_defect = 0.0;

  std::int64_t nnz() const { return std::int64_t(values.size()); }
  void matvec(const double* x, double* y) const;
  std::vector<double> matvec(const std::vector<double>& x) const;
  std::vector<double> diagonal() const;
  double max_abs() const;
};

struct AssembleOptions {
  // Escalates a pre-symmetrization defect above 1e-6 relative from a warning
  // to an error. Staircase masks (disk) keep an O(1) defect, so strict mode
  // is only meaningful on tensor-product domains.
  bool strict = false;
};

// -L_h = G^T T_e G with T sampled at edge midpoints plus the symmetric
// central-difference cross part for full tensors; Dirichlet data (u = 0 off
// the interior). Positive definite by construction.
SparseSymMatrix assemble_L(const GridDomain& domain, const TensorField& field);

// A_h = L_h(L_h u) under the clamped conditions: the first application is
// evaluated on interior and boundary rows with ghost values mirrored through
// the stencil center, the second consumes those rows; the product is then
// symmetrized with the defect recorded.
SparseSymMatrix assemble_clamped(const GridDomain& domain, const TensorField& field,
                                 const AssembleOptions& options = {});

// Coordinate format, symmetric, 1-based, lower triangle.
void write_matrix_market(const SparseSymMatrix& A, std::ostream& out);
void write_matrix_market(const SparseSymMatrix& A, const std::string& path);

}  // namespace platelab
