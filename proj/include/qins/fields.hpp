#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>

namespace qins {

enum class Mode : std::uint8_t { Torus = 0, NeumannRect = 1 };

/// Reflection parity of a field about the walls of a NeumannRect grid.
/// Even fields are cosine series, odd fields are sine series. Ignored on the torus.
enum class Parity : std::uint8_t { Even, Odd };

struct Symmetry {
  Parity x = Parity::Even;
  Parity y = Parity::Even;
  friend bool operator==(Symmetry, Symmetry) = default;
};

inline constexpr Symmetry kScalarSym{Parity::Even, Parity::Even};
inline constexpr Symmetry kShearSym{Parity::Odd, Parity::Odd};

/// Parity of component `axis` of a vector field (normal component is odd).
constexpr Symmetry vector_sym(int axis) {
  return axis == 0 ? Symmetry{Parity::Odd, Parity::Even} : Symmetry{Parity::Even, Parity::Odd};
}

Symmetry flip(Symmetry s, int axis);
Symmetry combine(Symmetry a, Symmetry b);

namespace detail {
struct FftPlans;
}

/// Collocation grid on a periodic box or a free-slip rectangle.
///
/// Torus points sit at x_i = i L / N. Rectangle points are cell centred,
/// x_i = (i + 1/2) L / N, and all spectral work happens on the mirrored
/// 2N-periodic extension, which turns cosine/sine series into plain FFTs.
class Grid {
 public:
  Grid(Mode mode, double l1, double l2, int n1, int n2);

  Mode mode() const { return mode_; }
  double length(int axis) const { return l_[axis]; }
  int points(int axis) const { return n_[axis]; }
  int size() const { return n_[0] * n_[1]; }
  /// Points of the periodic work grid along `axis` (N on the torus, 2N on the rectangle).
  int work_points(int axis) const;
  /// Period of the work grid along `axis`.
  double period(int axis) const;
  double coord(int axis, int i) const;
  double cell_area() const { return l_[0] * l_[1] / size(); }
  double volume() const { return l_[0] * l_[1]; }
  /// Angular wavenumber of signed work-grid mode m.
  double wavenumber(int axis, int m) const;
  bool is_square() const;

  const detail::FftPlans& plans() const { return *plans_; }
  bool same_as(const Grid& o) const;

 private:
  Mode mode_;
  std::array<double, 2> l_;
  std::array<int, 2> n_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

/// Half-complex coefficients of the work-grid field, normalised so that a
/// single mode of unit amplitude has coefficient 1/2 (0 mode: the mean).
struct Spectrum {
  int m1 = 0;
  int m2h = 0;  // m2 / 2 + 1
  Eigen::ArrayXcd c;
  std::complex<double>& at(int i1, int j2) { return c[static_cast<Eigen::Index>(i1) * m2h + j2]; }
  std::complex<double> at(int i1, int j2) const {
    return c[static_cast<Eigen::Index>(i1) * m2h + j2];
  }
};

class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, Symmetry sym = kScalarSym);
  ScalarField(const Grid& grid, Eigen::ArrayXd values, Symmetry sym = kScalarSym);

  static ScalarField constant(const Grid& grid, double value, Symmetry sym = kScalarSym);
  static ScalarField from_function(const Grid& grid, const std::function<double(double, double)>& f,
                                   Symmetry sym = kScalarSym);

  const Grid& grid() const { return grid_; }
  Symmetry sym() const { return sym_; }
  Eigen::ArrayXd& values() { return values_; }
  const Eigen::ArrayXd& values() const { return values_; }
  double operator()(int i, int j) const { return values_[i * grid_.points(1) + j]; }
  double& operator()(int i, int j) { return values_[i * grid_.points(1) + j]; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  Symmetry sym_;
  Eigen::ArrayXd values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);

/// Two-component vector field; component k carries vector_sym(k).
class VectorField {
 public:
  explicit VectorField(const Grid& grid);
  VectorField(ScalarField v1, ScalarField v2);

  const Grid& grid() const { return comp_[0].grid(); }
  ScalarField& operator[](int k) { return comp_[k]; }
  const ScalarField& operator[](int k) const { return comp_[k]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);

 private:
  std::array<ScalarField, 2> comp_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator-(VectorField a);
VectorField operator*(double s, VectorField a);

/// Symmetric 2x2 tensor field.
struct TensorField {
  ScalarField xx, xy, yy;
  explicit TensorField(const Grid& grid);
  TensorField(ScalarField a, ScalarField b, ScalarField c);
  const ScalarField& operator()(int i, int j) const;
};

// Transforms ---------------------------------------------------------------

enum class Direction { Forward, Inverse };

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Grid& grid, const Spectrum& s, Symmetry sym);

/// Signed mode number of work-grid index i along an axis of length m.
inline int signed_mode(int i, int m) { return i <= m / 2 ? i : i - m; }

/// Multiply every coefficient by symbol(k1, k2); Nyquist rows/columns are zeroed.
ScalarField apply_symbol(const ScalarField& f, Symmetry out,
                         const std::function<std::complex<double>(double, double)>& symbol);

// Spectral calculus --------------------------------------------------------

ScalarField partial(const ScalarField& f, int axis);
/// Mixed derivative of orders (p1, p2).
ScalarField partial(const ScalarField& f, int p1, int p2);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);
/// Symmetric gradient D v = (grad v + grad v^T) / 2.
TensorField sym_grad(const VectorField& v);
/// Row divergence: (div T)_i = sum_j d_j T_ij.
VectorField div(const TensorField& t);

/// Remove Nyquist content.
ScalarField nyquist_free(const ScalarField& f);
VectorField nyquist_free(const VectorField& v);
/// Two-thirds rule filter.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);
/// Dealiased product D(D(a) D(b)).
ScalarField product(const ScalarField& a, const ScalarField& b);
/// Plain collocation product.
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);
ScalarField map(const ScalarField& f, const std::function<double(double)>& fn);

/// Spectral interpolant evaluated at an arbitrary point.
double evaluate(const ScalarField& f, double x, double y);

// Integrals and norms ------------------------------------------------------

double inner_L2(const ScalarField& f, const ScalarField& g);
double inner_L2(const VectorField& v, const VectorField& w);
double mean(const ScalarField& f);
double max_abs(const ScalarField& f);

enum class Space { L2, H1, Hm1, H2, H3 };

/// Squared L2 norm of the full order-k derivative tensor.
double derivative_energy(const ScalarField& f, int order);

/// Norm in the requested space; Hm1 requires mean-zero input.
double norm(const ScalarField& f, Space space = Space::L2);
double norm(const VectorField& v, Space space = Space::L2);
double norm(const TensorField& t);

// Random smooth fields -----------------------------------------------------

/// Random real field with modes |m| <= max_mode and amplitude decaying like decay^(|m1|+|m2|).
ScalarField random_smooth(const Grid& grid, Symmetry sym, std::mt19937_64& rng, int max_mode = 4,
                          double decay = 0.5);
VectorField random_smooth_vector(const Grid& grid, std::mt19937_64& rng, int max_mode = 4,
                                 double decay = 0.5);

// Snapshot format ----------------------------------------------------------

struct Snapshot {
  Grid grid;
  ScalarField c;
  VectorField v;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const ScalarField& c, const VectorField& v);
Snapshot read_snapshot(const std::string& path);

}  // namespace qins
