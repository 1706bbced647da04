#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "platelab/errors.hpp"

namespace platelab {

// Lattice node classification. Interior nodes carry unknowns, boundary nodes
// carry the zero Dirichlet value, exterior nodes lie outside the mask.
enum class NodeKind : std::uint8_t { exterior = 0, interior = 1, boundary = 2 };

using Point = std::array<double, 2>;

struct GridDomain {
  int dim = 2;  // 1 or 2
  double h = 0.0;
  int nx = 0;  // lattice node count along x
  int ny = 1;  // lattice node count along y (1 in 1D)
  Point origin{0.0, 0.0};
  std::vector<NodeKind> kind;                 // nx*ny, row-major (y outer)
  std::vector<std::int64_t> interior_nodes;   // unknown -> lattice index
  std::vector<std::int64_t> interior_index;   // lattice -> unknown, -1 if none

  std::int64_t lattice_size() const { return std::int64_t(nx) * ny; }
  std::size_t interior_count() const { return interior_nodes.size(); }
  double cell_weight() const;  // h^dim, the quadrature weight per interior node

  Point node_point(std::int64_t lattice) const {
    return {origin[0] + double(lattice % nx) * h,
            dim == 2 ? origin[1] + double(lattice / nx) * h : 0.0};
  }
  Point interior_point(std::size_t i) const { return node_point(interior_nodes[i]); }

  // Same lattice, origin shifted; the spectrum is unchanged but the position
  // field (and so I_0) moves with it.
  GridDomain translated(const Point& shift) const;
};

GridDomain build_interval(double length, int N);
GridDomain build_rectangle(double Lx, double Ly, int Nx, int Ny);
GridDomain build_disk(double R, int N);

enum class TensorKind { identity, diagonal, rotated };

using ScalarField = std::function<double(const Point&)>;

// Symmetric positive definite coefficient tensor T(x). Samplers are pure and
// total; identity returns the exact identity matrix.
struct TensorField {
  TensorKind kind = TensorKind::identity;
  int dim = 2;
  double fd_step = 1e-3;  // central-difference step for trace_nabla_T
  ScalarField a, b, theta;

  // Row-major sample {t11, t12, t21, t22}; t12 == t21 exactly. In 1D only
  // t11 is meaningful and the rest are zero.
  std::array<double, 4> value(const Point& p) const;
  double entry(const Point& p, int r, int c) const { return value(p)[r * 2 + c]; }
};

TensorField identity_field(int dim = 2);
TensorField diagonal_field(ScalarField a, ScalarField b, int dim = 2, double fd_step = 1e-3);
TensorField rotated_field(ScalarField theta, ScalarField a, ScalarField b,
                          double fd_step = 1e-3);

// Component j is sum_i d_i T_ij by central differences with field.fd_step.
Point trace_nabla_T(const TensorField& field, const Point& p);

struct ConstantOverrides {
  std::optional<double> S0, T_star, T0, I0, H0;
  std::optional<int> m;
};

// Constants entering the bound evaluators. Flat grids give S0 = H0 = 0 and
// m = n; overrides let externally supplied curved-case values through.
struct GeometricConstants {
  int n = 2;
  int m = 2;
  double S0 = 0.0;
  double T_star = 0.0;
  double T0 = 0.0;
  double I0 = 0.0;
  double H0 = 0.0;
};

GeometricConstants geometric_constants(const GridDomain& domain, const TensorField& field,
                                       const ConstantOverrides& overrides = {});

}  // namespace platelab
