#include "qins/fields.hpp"

#include "qins/elliptic.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace qins {

namespace detail {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftPlans {
  int m1 = 0;
  int m2 = 0;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  FftPlans(int a, int b) : m1(a), m2(b) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* r = fftw_alloc_real(static_cast<size_t>(m1) * m2);
    fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(m1) * (m2 / 2 + 1));
    r2c = fftw_plan_dft_r2c_2d(m1, m2, r, c, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_2d(m1, m2, c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

namespace {

std::shared_ptr<const FftPlans> plans_for(int m1, int m2) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::weak_ptr<const FftPlans>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& slot = cache[{m1, m2}];
  if (auto p = slot.lock()) return p;
  auto p = std::make_shared<const FftPlans>(m1, m2);
  slot = p;
  return p;
}

// Per-thread aligned buffers for the new-array FFTW interface.
struct Workspace {
  size_t nr = 0;
  size_t nc = 0;
  double* r = nullptr;
  fftw_complex* c = nullptr;
  void reserve(size_t real_size, size_t complex_size) {
    if (real_size > nr) {
      if (r) fftw_free(r);
      r = fftw_alloc_real(real_size);
      nr = real_size;
    }
    if (complex_size > nc) {
      if (c) fftw_free(c);
      c = fftw_alloc_complex(complex_size);
      nc = complex_size;
    }
  }
  ~Workspace() {
    if (r) fftw_free(r);
    if (c) fftw_free(c);
  }
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

}  // namespace
}  // namespace detail

Symmetry flip(Symmetry s, int axis) {
  auto f = [](Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; };
  if (axis == 0) s.x = f(s.x);
  else s.y = f(s.y);
  return s;
}

Symmetry combine(Symmetry a, Symmetry b) {
  auto c = [](Parity p, Parity q) { return p == q ? Parity::Even : Parity::Odd; };
  return {c(a.x, b.x), c(a.y, b.y)};
}

// Grid ---------------------------------------------------------------------

Grid::Grid(Mode mode, double l1, double l2, int n1, int n2) : mode_(mode), l_{l1, l2}, n_{n1, n2} {
  if (n1 < 4 || n2 < 4 || n1 % 2 != 0 || n2 % 2 != 0)
    throw std::invalid_argument("grid points must be even and at least 4");
  if (!(l1 > 0.0) || !(l2 > 0.0) || !std::isfinite(l1) || !std::isfinite(l2))
    throw std::invalid_argument("grid lengths must be positive");
  plans_ = detail::plans_for(work_points(0), work_points(1));
}

int Grid::work_points(int axis) const { return mode_ == Mode::Torus ? n_[axis] : 2 * n_[axis]; }

double Grid::period(int axis) const { return mode_ == Mode::Torus ? l_[axis] : 2.0 * l_[axis]; }

double Grid::coord(int axis, int i) const {
  const double h = l_[axis] / n_[axis];
  return mode_ == Mode::Torus ? i * h : (i + 0.5) * h;
}

double Grid::wavenumber(int axis, int m) const {
  return 2.0 * std::numbers::pi * m / period(axis);
}

bool Grid::is_square() const { return l_[0] == l_[1] && n_[0] == n_[1]; }

bool Grid::same_as(const Grid& o) const {
  return mode_ == o.mode_ && l_ == o.l_ && n_ == o.n_;
}

// Fields -------------------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, Symmetry sym)
    : grid_(grid), sym_(sym), values_(Eigen::ArrayXd::Zero(grid.size())) {}

ScalarField::ScalarField(const Grid& grid, Eigen::ArrayXd values, Symmetry sym)
    : grid_(grid), sym_(sym), values_(std::move(values)) {
  if (values_.size() != grid.size()) throw std::invalid_argument("field size does not match grid");
}

ScalarField ScalarField::constant(const Grid& grid, double value, Symmetry sym) {
  return ScalarField(grid, Eigen::ArrayXd::Constant(grid.size(), value), sym);
}

ScalarField ScalarField::from_function(const Grid& grid,
                                       const std::function<double(double, double)>& f,
                                       Symmetry sym) {
  ScalarField out(grid, sym);
  for (int i = 0; i < grid.points(0); ++i)
    for (int j = 0; j < grid.points(1); ++j) out(i, j) = f(grid.coord(0, i), grid.coord(1, j));
  return out;
}

namespace {
void check_compatible(const ScalarField& a, const ScalarField& b) {
  if (!a.grid().same_as(b.grid())) throw std::invalid_argument("fields live on different grids");
  if (a.grid().mode() == Mode::NeumannRect && !(a.sym() == b.sym()))
    throw std::invalid_argument("fields have different boundary parity");
}
}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_compatible(*this, o);
  values_ += o.values_;
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_compatible(*this, o);
  values_ -= o.values_;
  return *this;
}
ScalarField& ScalarField::operator*=(double s) {
  values_ *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }

VectorField::VectorField(const Grid& grid)
    : comp_{ScalarField(grid, vector_sym(0)), ScalarField(grid, vector_sym(1))} {}

VectorField::VectorField(ScalarField v1, ScalarField v2) : comp_{std::move(v1), std::move(v2)} {
  if (!comp_[0].grid().same_as(comp_[1].grid()))
    throw std::invalid_argument("vector components on different grids");
  if (comp_[0].grid().mode() == Mode::NeumannRect &&
      (!(comp_[0].sym() == vector_sym(0)) || !(comp_[1].sym() == vector_sym(1))))
    throw std::invalid_argument("vector components have wrong boundary parity");
}

VectorField& VectorField::operator+=(const VectorField& o) {
  comp_[0] += o.comp_[0];
  comp_[1] += o.comp_[1];
  return *this;
}
VectorField& VectorField::operator-=(const VectorField& o) {
  comp_[0] -= o.comp_[0];
  comp_[1] -= o.comp_[1];
  return *this;
}
VectorField& VectorField::operator*=(double s) {
  comp_[0] *= s;
  comp_[1] *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator-(VectorField a) { return a *= -1.0; }
VectorField operator*(double s, VectorField a) { return a *= s; }

TensorField::TensorField(const Grid& grid)
    : xx(grid, kScalarSym), xy(grid, kShearSym), yy(grid, kScalarSym) {}

TensorField::TensorField(ScalarField a, ScalarField b, ScalarField c)
    : xx(std::move(a)), xy(std::move(b)), yy(std::move(c)) {}

const ScalarField& TensorField::operator()(int i, int j) const {
  if (i == 0 && j == 0) return xx;
  if (i == 1 && j == 1) return yy;
  return xy;
}

// Transforms ---------------------------------------------------------------

Spectrum forward(const ScalarField& f) {
  const Grid& g = f.grid();
  if (!f.values().allFinite()) throw std::invalid_argument("non-finite field values");
  const int n1 = g.points(0), n2 = g.points(1);
  const int m1 = g.work_points(0), m2 = g.work_points(1);
  const int m2h = m2 / 2 + 1;
  auto& ws = detail::workspace();
  ws.reserve(static_cast<size_t>(m1) * m2, static_cast<size_t>(m1) * m2h);
  const double* v = f.values().data();
  if (g.mode() == Mode::Torus) {
    std::memcpy(ws.r, v, sizeof(double) * n1 * n2);
  } else {
    const double sx = f.sym().x == Parity::Odd ? -1.0 : 1.0;
    const double sy = f.sym().y == Parity::Odd ? -1.0 : 1.0;
    for (int I = 0; I < m1; ++I) {
      const bool mirror_x = I >= n1;
      const int i = mirror_x ? m1 - 1 - I : I;
      const double fx = mirror_x ? sx : 1.0;
      double* row = ws.r + static_cast<size_t>(I) * m2;
      const double* src = v + static_cast<size_t>(i) * n2;
      for (int j = 0; j < n2; ++j) {
        row[j] = fx * src[j];
        row[m2 - 1 - j] = fx * sy * src[j];
      }
    }
  }
  fftw_execute_dft_r2c(g.plans().r2c, ws.r, ws.c);
  Spectrum s;
  s.m1 = m1;
  s.m2h = m2h;
  s.c.resize(static_cast<Eigen::Index>(m1) * m2h);
  const double scale = 1.0 / (static_cast<double>(m1) * m2);
  for (Eigen::Index k = 0; k < s.c.size(); ++k)
    s.c[k] = std::complex<double>(ws.c[k][0], ws.c[k][1]) * scale;
  return s;
}

ScalarField inverse(const Grid& g, const Spectrum& s, Symmetry sym) {
  const int n1 = g.points(0), n2 = g.points(1);
  const int m1 = g.work_points(0), m2 = g.work_points(1);
  if (s.m1 != m1 || s.m2h != m2 / 2 + 1) throw std::invalid_argument("spectrum does not match grid");
  auto& ws = detail::workspace();
  ws.reserve(static_cast<size_t>(m1) * m2, static_cast<size_t>(m1) * s.m2h);
  for (Eigen::Index k = 0; k < s.c.size(); ++k) {
    ws.c[k][0] = s.c[k].real();
    ws.c[k][1] = s.c[k].imag();
  }
  fftw_execute_dft_c2r(g.plans().c2r, ws.c, ws.r);
  ScalarField out(g, sym);
  double* v = out.values().data();
  for (int i = 0; i < n1; ++i)
    std::memcpy(v + static_cast<size_t>(i) * n2, ws.r + static_cast<size_t>(i) * m2,
                sizeof(double) * n2);
  return out;
}

ScalarField apply_symbol(const ScalarField& f, Symmetry out,
                         const std::function<std::complex<double>(double, double)>& symbol) {
  const Grid& g = f.grid();
  Spectrum s = forward(f);
  const int m1 = s.m1, m2 = g.work_points(1);
  for (int i1 = 0; i1 < m1; ++i1) {
    const int q1 = signed_mode(i1, m1);
    const double k1 = g.wavenumber(0, q1);
    for (int j2 = 0; j2 < s.m2h; ++j2) {
      if (2 * i1 == m1 || 2 * j2 == m2) {
        s.at(i1, j2) = 0.0;
        continue;
      }
      s.at(i1, j2) *= symbol(k1, g.wavenumber(1, j2));
    }
  }
  return inverse(g, s, out);
}

// Spectral calculus --------------------------------------------------------

ScalarField partial(const ScalarField& f, int p1, int p2) {
  Symmetry out = f.sym();
  if (p1 % 2) out = flip(out, 0);
  if (p2 % 2) out = flip(out, 1);
  const std::complex<double> I(0.0, 1.0);
  return apply_symbol(f, out, [&](double k1, double k2) {
    return std::pow(I * k1, p1) * std::pow(I * k2, p2);
  });
}

ScalarField partial(const ScalarField& f, int axis) {
  return axis == 0 ? partial(f, 1, 0) : partial(f, 0, 1);
}

VectorField grad(const ScalarField& f) { return VectorField(partial(f, 0), partial(f, 1)); }

ScalarField div(const VectorField& v) { return partial(v[0], 0) + partial(v[1], 1); }

ScalarField laplacian(const ScalarField& f) {
  return apply_symbol(f, f.sym(), [](double k1, double k2) { return -(k1 * k1 + k2 * k2); });
}

VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v[0]), laplacian(v[1])); }

TensorField sym_grad(const VectorField& v) {
  return TensorField(partial(v[0], 0), 0.5 * (partial(v[0], 1) + partial(v[1], 0)),
                     partial(v[1], 1));
}

VectorField div(const TensorField& t) {
  return VectorField(partial(t.xx, 0) + partial(t.xy, 1), partial(t.xy, 0) + partial(t.yy, 1));
}

ScalarField nyquist_free(const ScalarField& f) {
  return apply_symbol(f, f.sym(), [](double, double) { return 1.0; });
}

VectorField nyquist_free(const VectorField& v) {
  return VectorField(nyquist_free(v[0]), nyquist_free(v[1]));
}

ScalarField dealias(const ScalarField& f) {
  const Grid& g = f.grid();
  Spectrum s = forward(f);
  const int m1 = s.m1, m2 = g.work_points(1);
  for (int i1 = 0; i1 < m1; ++i1) {
    const int q1 = std::abs(signed_mode(i1, m1));
    for (int j2 = 0; j2 < s.m2h; ++j2)
      if (3 * q1 >= m1 || 3 * j2 >= m2) s.at(i1, j2) = 0.0;
  }
  return inverse(g, s, f.sym());
}

VectorField dealias(const VectorField& v) { return VectorField(dealias(v[0]), dealias(v[1])); }

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  if (!a.grid().same_as(b.grid())) throw std::invalid_argument("fields live on different grids");
  return ScalarField(a.grid(), a.values() * b.values(), combine(a.sym(), b.sym()));
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  return dealias(pointwise_product(dealias(a), dealias(b)));
}

ScalarField map(const ScalarField& f, const std::function<double(double)>& fn) {
  return ScalarField(f.grid(), f.values().unaryExpr(fn), f.sym());
}

double evaluate(const ScalarField& f, double x, double y) {
  const Grid& g = f.grid();
  const Spectrum s = forward(f);
  const int m1 = s.m1, m2 = g.work_points(1);
  double xs = x, ys = y;
  if (g.mode() == Mode::NeumannRect) {
    // Work-grid sample 0 sits half a cell inside the wall.
    xs -= 0.5 * g.length(0) / g.points(0);
    ys -= 0.5 * g.length(1) / g.points(1);
  }
  double sum = 0.0;
  for (int i1 = 0; i1 < m1; ++i1) {
    const double k1 = g.wavenumber(0, signed_mode(i1, m1));
    for (int j2 = 0; j2 < s.m2h; ++j2) {
      if (2 * i1 == m1 || 2 * j2 == m2) continue;
      const double w = j2 == 0 ? 1.0 : 2.0;
      const double phase = k1 * xs + g.wavenumber(1, j2) * ys;
      sum += w * (s.at(i1, j2) * std::complex<double>(std::cos(phase), std::sin(phase))).real();
    }
  }
  return sum;
}

// Integrals and norms ------------------------------------------------------

double inner_L2(const ScalarField& f, const ScalarField& g) {
  if (!f.grid().same_as(g.grid())) throw std::invalid_argument("fields live on different grids");
  return (f.values() * g.values()).sum() * f.grid().cell_area();
}

double inner_L2(const VectorField& v, const VectorField& w) {
  return inner_L2(v[0], w[0]) + inner_L2(v[1], w[1]);
}

double mean(const ScalarField& f) { return f.values().mean(); }

double max_abs(const ScalarField& f) { return f.values().abs().maxCoeff(); }

namespace {
double sq(double x) { return x * x; }
}  // namespace

double derivative_energy(const ScalarField& f, int order) {
  double e = 0.0;
  for (int p1 = 0; p1 <= order; ++p1) {
    const int p2 = order - p1;
    // Each mixed derivative appears binomial(order, p1) times in the full tensor.
    double mult = 1.0;
    for (int k = 0; k < p1; ++k) mult = mult * (order - k) / (k + 1);
    e += mult * sq(norm(partial(f, p1, p2), Space::L2));
  }
  return e;
}

double norm(const ScalarField& f, Space space) {
  const double l2sq = inner_L2(f, f);
  switch (space) {
    case Space::L2:
      return std::sqrt(l2sq);
    case Space::H1:
      return std::sqrt(l2sq + derivative_energy(f, 1));
    case Space::H2:
      return std::sqrt(l2sq + derivative_energy(f, 1) + derivative_energy(f, 2));
    case Space::H3:
      return std::sqrt(l2sq + derivative_energy(f, 1) + derivative_energy(f, 2) +
                       derivative_energy(f, 3));
    case Space::Hm1:
      return norm(grad(neumann_laplacian_solve(f)), Space::L2);
  }
  return 0.0;
}

double norm(const VectorField& v, Space space) {
  return std::sqrt(sq(norm(v[0], space)) + sq(norm(v[1], space)));
}

double norm(const TensorField& t) {
  return std::sqrt(inner_L2(t.xx, t.xx) + 2.0 * inner_L2(t.xy, t.xy) + inner_L2(t.yy, t.yy));
}

// Random smooth fields -----------------------------------------------------

ScalarField random_smooth(const Grid& grid, Symmetry sym, std::mt19937_64& rng, int max_mode,
                          double decay) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int kmax1 = std::min(max_mode, grid.points(0) / 2 - 1);
  const int kmax2 = std::min(max_mode, grid.points(1) / 2 - 1);
  ScalarField out(grid, sym);
  auto& v = out.values();
  const int n1 = grid.points(0), n2 = grid.points(1);
  if (grid.mode() == Mode::Torus) {
    for (int m1 = -kmax1; m1 <= kmax1; ++m1) {
      for (int m2 = 0; m2 <= kmax2; ++m2) {
        if (m2 == 0 && m1 < 0) continue;
        const double amp = std::pow(decay, std::abs(m1) + m2);
        const double a = amp * normal(rng);
        const double b = (m1 == 0 && m2 == 0) ? 0.0 : amp * normal(rng);
        const double k1 = grid.wavenumber(0, m1), k2 = grid.wavenumber(1, m2);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) {
            const double ph = k1 * grid.coord(0, i) + k2 * grid.coord(1, j);
            v[i * n2 + j] += a * std::cos(ph) + b * std::sin(ph);
          }
      }
    }
  } else {
    auto basis = [](Parity p, double k, double x) {
      return p == Parity::Even ? std::cos(k * x) : std::sin(k * x);
    };
    const int lo1 = sym.x == Parity::Even ? 0 : 1;
    const int lo2 = sym.y == Parity::Even ? 0 : 1;
    for (int m1 = lo1; m1 <= kmax1; ++m1)
      for (int m2 = lo2; m2 <= kmax2; ++m2) {
        const double a = std::pow(decay, m1 + m2) * normal(rng);
        const double k1 = grid.wavenumber(0, m1), k2 = grid.wavenumber(1, m2);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j)
            v[i * n2 + j] +=
                a * basis(sym.x, k1, grid.coord(0, i)) * basis(sym.y, k2, grid.coord(1, j));
      }
  }
  return out;
}

VectorField random_smooth_vector(const Grid& grid, std::mt19937_64& rng, int max_mode,
                                 double decay) {
  ScalarField a = random_smooth(grid, vector_sym(0), rng, max_mode, decay);
  ScalarField b = random_smooth(grid, vector_sym(1), rng, max_mode, decay);
  return VectorField(std::move(a), std::move(b));
}

// Snapshot format ----------------------------------------------------------

namespace {

template <class T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&value, b, sizeof(T));
    return value;
  }
}

template <class T>
void put(std::ostream& os, T value) {
  value = to_little(value);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("truncated snapshot");
  return to_little(value);
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField& c, const VectorField& v) {
  const Grid& g = c.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.write("QINS", 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(g.mode()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.points(0)));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.points(1)));
  put<double>(os, g.length(0));
  put<double>(os, g.length(1));
  for (const ScalarField* f : {&c, &v[0], &v[1]})
    for (Eigen::Index k = 0; k < f->values().size(); ++k) put<double>(os, f->values()[k]);
  if (!os) throw std::runtime_error("write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "QINS", 4) != 0) throw std::runtime_error("bad snapshot magic");
  const auto version = get<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
  const auto mode = get<std::uint8_t>(is);
  if (mode > 1) throw std::runtime_error("bad snapshot mode byte");
  const auto n1 = static_cast<int>(get<std::uint32_t>(is));
  const auto n2 = static_cast<int>(get<std::uint32_t>(is));
  const double l1 = get<double>(is);
  const double l2 = get<double>(is);
  Grid g(static_cast<Mode>(mode), l1, l2, n1, n2);
  auto read_field = [&](Symmetry sym) {
    ScalarField f(g, sym);
    for (Eigen::Index k = 0; k < f.values().size(); ++k) f.values()[k] = get<double>(is);
    return f;
  };
  ScalarField c = read_field(kScalarSym);
  ScalarField v1 = read_field(vector_sym(0));
  ScalarField v2 = read_field(vector_sym(1));
  return Snapshot{g, std::move(c), VectorField(std::move(v1), std::move(v2))};
}

}  // namespace qins
