#include "orb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace orb {

double GridField::sup() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  return m;
}

double GridField::inf() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values) m = std::min(m, v);
  return m;
}

bool GridField::finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

static void check_same_grid(const GridField& a, const GridField& b) {
  if (a.grid.get() != b.grid.get())
    throw std::invalid_argument("GridField arithmetic across different grids");
}

GridField operator+(const GridField& a, const GridField& b) {
  check_same_grid(a, b);
  GridField r = a;
  for (Index i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

GridField operator-(const GridField& a, const GridField& b) {
  check_same_grid(a, b);
  GridField r = a;
  for (Index i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

GridField operator*(double s, const GridField& a) {
  GridField r = a;
  for (double& v : r.values) v *= s;
  return r;
}

GridField& operator+=(GridField& a, const GridField& b) {
  check_same_grid(a, b);
  for (Index i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

GridField& operator-=(GridField& a, const GridField& b) {
  check_same_grid(a, b);
  for (Index i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

GridField shifted(const GridField& a, double s) {
  GridField r = a;
  for (double& v : r.values) v += s;
  return r;
}

namespace {

// Integer 2n x 2n matrix acting on lattice coordinates, derived from a
// unitary matrix with Gaussian-integer entries.
using IntMat = std::array<std::array<int, 6>, 6>;

IntMat real_form(const Eigen::MatrixXcd& u, int n) {
  IntMat r{};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double re = u(j, k).real(), im = u(j, k).imag();
      int a = static_cast<int>(std::lround(re));
      int b = static_cast<int>(std::lround(im));
      if (std::abs(re - a) > 1e-12 || std::abs(im - b) > 1e-12)
        throw std::invalid_argument("group element entries are not lattice compatible");
      // z'_j = sum_k (a + ib)(x_k + i y_k)
      r[2 * j][2 * k] = a;
      r[2 * j][2 * k + 1] = -b;
      r[2 * j + 1][2 * k] = b;
      r[2 * j + 1][2 * k + 1] = a;
    }
  return r;
}

std::vector<Index> permutation_of(const OrbifoldGrid& grid, const Eigen::MatrixXcd& u) {
  IntMat r = real_form(u, grid.n);
  const Index np = grid.num_points();
  std::vector<Index> perm(np);
  for (Index i = 0; i < np; ++i) {
    auto c = grid.coords(i);
    int out[6] = {0, 0, 0, 0, 0, 0};
    for (int d = 0; d < 2 * grid.n; ++d) {
      long s = 0;
      for (int e = 0; e < 2 * grid.n; ++e) s += static_cast<long>(r[d][e]) * c[e];
      out[d] = static_cast<int>(s % grid.resolution);
    }
    perm[i] = grid.index(out);
  }
  return perm;
}

GroupAction make_group(const OrbifoldGrid& grid, const std::string& spec) {
  const int n = grid.n;
  GroupAction g;
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  std::vector<Eigen::MatrixXcd> gens;
  if (spec == "trivial") {
    g.name = "trivial";
    g.id = 0;
  } else if (spec == "Z2") {
    g.name = "Z2";
    g.id = 1;
    gens.push_back(-id);
  } else if (spec == "Z4" || spec == "Z4-diagonal") {
    g.name = "Z4";
    g.id = 2;
    gens.push_back(std::complex<double>(0, 1) * id);
  } else if (spec == "swap" || spec == "coordinate-swap") {
    if (n != 2) throw std::invalid_argument("coordinate-swap group requires n = 2");
    g.name = "swap";
    g.id = 3;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
    s(0, 1) = s(1, 0) = 1;
    gens.push_back(s);
  } else {
    throw std::invalid_argument("unknown group_spec: " + spec);
  }

  // Close the generator set under multiplication (groups here are tiny).
  std::vector<Eigen::MatrixXcd> elems{id};
  auto contains = [&](const Eigen::MatrixXcd& m) {
    for (const auto& e : elems)
      if ((e - m).cwiseAbs().maxCoeff() < 1e-9) return true;
    return false;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t a = 0; a < elems.size(); ++a)
      for (const auto& gen : gens) {
        Eigen::MatrixXcd m = gen * elems[a];
        if (!contains(m)) {
          elems.push_back(m);
          grew = true;
        }
      }
    if (elems.size() > 64) throw std::runtime_error("group closure did not terminate");
  }
  g.elements = elems;
  g.order = static_cast<int>(elems.size());
  for (const auto& e : elems) g.permutations.push_back(permutation_of(grid, e));
  return g;
}

}  // namespace

GridPtr build_grid(int n, int resolution, const std::string& group_spec) {
  if (n < 1 || n > 3) throw std::invalid_argument("complex dimension must be 1, 2 or 3");
  if (resolution < 2 || resolution % 2 != 0)
    throw std::invalid_argument("resolution must be even and >= 2");
  auto grid = std::make_shared<OrbifoldGrid>();
  grid->n = n;
  grid->resolution = resolution;
  grid->group = make_group(*grid, group_spec);
  if (resolution % grid->group.order != 0)
    throw std::invalid_argument("resolution must be divisible by the group order " +
                                std::to_string(grid->group.order));
  verify_group_axioms(*grid);
  return grid;
}

void verify_group_axioms(const OrbifoldGrid& grid) {
  const auto& g = grid.group;
  const Index np = grid.num_points();
  // bijectivity
  std::vector<char> seen(np);
  for (const auto& p : g.permutations) {
    std::fill(seen.begin(), seen.end(), 0);
    for (Index i = 0; i < np; ++i) {
      if (seen[p[i]]) throw std::runtime_error("group element is not a bijection on the grid");
      seen[p[i]] = 1;
    }
  }
  // closure and inverses by enumeration over the permutation table
  auto find = [&](const std::vector<Index>& p) -> int {
    for (int a = 0; a < g.order; ++a)
      if (g.permutations[a] == p) return a;
    return -1;
  };
  std::vector<Index> comp(np);
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b) {
      for (Index i = 0; i < np; ++i) comp[i] = g.permutations[a][g.permutations[b][i]];
      if (find(comp) < 0) throw std::runtime_error("group not closed under composition");
    }
  for (int a = 0; a < g.order; ++a) {
    bool has_inverse = false;
    for (int b = 0; b < g.order; ++b) {
      bool ident = true;
      for (Index i = 0; i < np && ident; ++i)
        ident = g.permutations[a][g.permutations[b][i]] == i;
      if (ident) { has_inverse = true; break; }
    }
    if (!has_inverse) throw std::runtime_error("group element has no inverse");
  }
}

GridField pullback(const GridField& f, int g) {
  const auto& perm = f.grid->group.permutations.at(g);
  GridField r(f.grid);
  for (Index i = 0; i < f.size(); ++i) r[i] = f[perm[i]];
  return r;
}

GridField group_average(const GridField& f) {
  if (!f.finite()) throw std::invalid_argument("group_average: field has non-finite values");
  const auto& g = f.grid->group;
  if (g.is_trivial()) return f;
  GridField r(f.grid);
  std::vector<char> done(f.size(), 0);
  std::vector<Index> orbit;
  for (Index i = 0; i < f.size(); ++i) {
    if (done[i]) continue;
    orbit.clear();
    for (int a = 0; a < g.order; ++a) orbit.push_back(g.permutations[a][i]);
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    bool all_equal = true;
    for (Index j : orbit) all_equal = all_equal && f[j] == f[orbit[0]];
    double avg;
    if (all_equal) {
      avg = f[orbit[0]];  // keeps averaging exactly idempotent
    } else {
      double s = 0;
      int mult = g.order / static_cast<int>(orbit.size());
      for (Index j : orbit) s += f[j];
      avg = s * mult / g.order;
    }
    for (Index j : orbit) {
      r[j] = avg;
      done[j] = 1;
    }
  }
  return r;
}

double invariance_defect(const GridField& f) {
  const auto& g = f.grid->group;
  double d = 0;
  for (int a = 1; a < g.order; ++a)
    for (Index i = 0; i < f.size(); ++i)
      d = std::max(d, std::abs(f[g.permutations[a][i]] - f[i]));
  return d;
}

namespace {
constexpr char kFieldMagic[8] = {'O', 'R', 'B', 'F', 'L', 'D', '0', '1'};
}

void save_field(const GridField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kFieldMagic, 8);
  std::uint32_t hdr[4] = {static_cast<std::uint32_t>(f.grid->n),
                          static_cast<std::uint32_t>(f.grid->resolution),
                          static_cast<std::uint32_t>(f.grid->group.id), 0};
  std::uint64_t count = f.size();
  os.write(reinterpret_cast<const char*>(hdr), 16);
  os.write(reinterpret_cast<const char*>(&count), 8);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

GridField load_field(const std::string& path, GridPtr grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  std::uint32_t hdr[4];
  std::uint64_t count;
  is.read(magic, 8);
  is.read(reinterpret_cast<char*>(hdr), 16);
  is.read(reinterpret_cast<char*>(&count), 8);
  if (!is || std::memcmp(magic, kFieldMagic, 8) != 0)
    throw std::runtime_error("bad field file header: " + path);
  if (hdr[0] != static_cast<std::uint32_t>(grid->n) ||
      hdr[1] != static_cast<std::uint32_t>(grid->resolution) ||
      hdr[2] != static_cast<std::uint32_t>(grid->group.id))
    throw std::runtime_error("field file does not match grid: " + path);
  GridField f(grid);
  if (count != f.size()) throw std::runtime_error("field file payload size mismatch");
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field file: " + path);
  return f;
}

void save_field_csv(const GridField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "index";
  for (int d = 0; d < 2 * f.grid->n; ++d) os << ",x" << d;
  os << ",value\n";
  os.precision(17);
  for (Index i = 0; i < f.size(); ++i) {
    auto x = f.grid->point(i);
    os << i;
    for (int d = 0; d < 2 * f.grid->n; ++d) os << ',' << x[d];
    os << ',' << f[i] << '\n';
  }
}

}  // namespace orb
