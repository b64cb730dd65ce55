#ifndef ORB_GRID_HPP
#define ORB_GRID_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace orb {

using Index = std::size_t;

/// Finite linear group acting on the torus lattice. Each element is stored
/// both as a unitary matrix on C^n and as an exact permutation of grid points.
struct GroupAction {
  int order = 1;
  int id = 0;  // serialization tag: 0 trivial, 1 Z2, 2 Z4, 3 swap
  std::string name = "trivial";
  std::vector<Eigen::MatrixXcd> elements;        // identity first
  std::vector<std::vector<Index>> permutations;  // permutations[g][i] = index of g(point_i)

  bool is_trivial() const { return order == 1; }
};

/// Periodic grid on the flat torus (C^n / Z^{2n}) together with a finite
/// group action; the discrete stand-in for a global-quotient orbifold.
class OrbifoldGrid {
 public:
  int n = 1;           // complex dimension
  int resolution = 0;  // points per real axis
  GroupAction group;

  Index num_points() const {
    Index p = 1;
    for (int d = 0; d < 2 * n; ++d) p *= static_cast<Index>(resolution);
    return p;
  }
  double spacing() const { return 1.0 / resolution; }

  // Row-major index <-> integer coordinates (a_0,...,a_{2n-1}), a_d in [0,m).
  // Axis 2j is Re(z_j), axis 2j+1 is Im(z_j).
  std::array<int, 6> coords(Index i) const {
    std::array<int, 6> c{};
    for (int d = 2 * n - 1; d >= 0; --d) {
      c[d] = static_cast<int>(i % resolution);
      i /= resolution;
    }
    return c;
  }
  Index index(const int* c) const {
    Index i = 0;
    for (int d = 0; d < 2 * n; ++d) {
      int a = ((c[d] % resolution) + resolution) % resolution;
      i = i * resolution + static_cast<Index>(a);
    }
    return i;
  }
  // Real coordinate of a point, x in [0,1)^{2n}.
  std::array<double, 6> point(Index i) const {
    auto c = coords(i);
    std::array<double, 6> x{};
    for (int d = 0; d < 2 * n; ++d) x[d] = static_cast<double>(c[d]) / resolution;
    return x;
  }
};

using GridPtr = std::shared_ptr<const OrbifoldGrid>;

/// Real scalar field on an OrbifoldGrid.
struct GridField {
  GridPtr grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->num_points(), fill) {}

  double& operator[](Index i) { return values[i]; }
  double operator[](Index i) const { return values[i]; }
  Index size() const { return values.size(); }

  double sup() const;
  double inf() const;
  bool finite() const;
};

// Pointwise arithmetic helpers (fields must share a grid).
GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& a);
GridField& operator+=(GridField& a, const GridField& b);
GridField& operator-=(GridField& a, const GridField& b);
GridField shifted(const GridField& a, double s);

/// grid construction; group_spec in {trivial, Z2, Z4, swap}.
/// Z2 is z -> -z (any n), Z4 is z_j -> i z_j diagonally, swap is
/// (z1,z2) -> (z2,z1) for n = 2.
GridPtr build_grid(int n, int resolution, const std::string& group_spec);

/// Exhaustive check of the group axioms on the stored permutations.
/// Throws std::runtime_error on violation.
void verify_group_axioms(const OrbifoldGrid& grid);

/// Pull a field back by group element g: result[i] = f[perm_g(i)].
GridField pullback(const GridField& f, int g);

/// Orbit-wise arithmetic mean over the group. The output is exactly
/// group-invariant and the map is idempotent in exact float arithmetic.
GridField group_average(const GridField& f);

/// Largest deviation sup_g sup_x |f(g x) - f(x)|.
double invariance_defect(const GridField& f);

// Binary serialization: 32-byte header (magic, n, resolution, group id,
// payload count) followed by row-major little-endian doubles. Round-trip
// is bit exact.
void save_field(const GridField& f, const std::string& path);
GridField load_field(const std::string& path, GridPtr grid);
void save_field_csv(const GridField& f, const std::string& path);

}  // namespace orb

#endif
