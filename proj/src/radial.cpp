#include "kglab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace kglab {

RadialGrid::RadialGrid(double r_max, std::size_t n) : r_max_(r_max), n_(n), dr_(0.0) {
  if (!std::isfinite(r_max) || r_max <= 0.0) {
    throw std::invalid_argument("radial grid: r_max must be positive and finite");
  }
  if (n < kMinNodes) {
    throw std::invalid_argument("radial grid: need at least 16 nodes");
  }
  dr_ = r_max / static_cast<double>(n);
  nodes_.resize(n);
  weights_.resize(n);
  faces_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * dr_;
    nodes_[i] = r;
    weights_[i] = r * r * dr_;
    faces_[i] = r * (r + dr_) / dr_;
  }
}

GridPtr build_grid(double r_max, std::size_t n) { return std::make_shared<const RadialGrid>(r_max, n); }

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("radial field: null grid");
  if (values_.size() != grid_->size()) {
    throw std::invalid_argument("radial field: value count does not match grid");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw std::invalid_argument("radial field: non-finite value");
  }
}

RadialField RadialField::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return RadialField(std::move(grid), std::vector<double>(n, 0.0));
}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
  return RadialField(std::move(grid), std::move(v));
}

double RadialField::sup_norm() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool RadialField::same_grid(const RadialField& other) const {
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  if (!a.same_grid(b)) throw GridMismatch();
}

namespace {

template <class Op>
RadialField zip(const RadialField& a, const RadialField& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return RadialField(a.grid_ptr(), std::move(out));
}

}  // namespace

RadialField operator+(const RadialField& a, const RadialField& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}
RadialField operator-(const RadialField& a, const RadialField& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}
RadialField operator*(const RadialField& a, const RadialField& b) {
  return zip(a, b, [](double x, double y) { return x * y; });
}
RadialField operator*(double c, const RadialField& f) {
  return map(f, [c](double x) { return c * x; });
}

RadialField map(const RadialField& f, const std::function<double(double)>& fn) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(f[i]);
  return RadialField(f.grid_ptr(), std::move(out));
}

void laplacian3d_into(const RadialGrid& grid, std::span<const double> f, std::span<double> out) {
  const std::size_t n = grid.size();
  // Flux form of the centered stencil: no flux through r = 0 (even ghost),
  // f_n = -f_{n-1} on the outer face.
  double flux_in = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double flux_out = grid.face_coefficient(i) * (f[i + 1] - f[i]);
    out[i] = (flux_out - flux_in) / grid.weight(i);
    flux_in = flux_out;
  }
  const double flux_out = grid.face_coefficient(n - 1) * (-2.0 * f[n - 1]);
  out[n - 1] = (flux_out - flux_in) / grid.weight(n - 1);
}

double weighted_sum(const RadialGrid& grid, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i];
  return kOmega3 * s;
}

double gradient_sq(const RadialGrid& grid, std::span<const double> f) {
  const std::size_t n = grid.size();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    s += grid.face_coefficient(i) * d * d;
  }
  s += 2.0 * grid.face_coefficient(n - 1) * f[n - 1] * f[n - 1];
  return kOmega3 * s;
}

RadialField laplacian3d(const RadialField& f) {
  std::vector<double> out(f.size());
  laplacian3d_into(f.grid(), f.values(), out);
  return RadialField(f.grid_ptr(), std::move(out));
}

double integrate(const RadialField& f) { return weighted_sum(f.grid(), f.values()); }

double inner_l2(const RadialField& f, const RadialField& g) {
  require_same_grid(f, g);
  const auto& grid = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i] * g[i];
  return kOmega3 * s;
}

double gradient_sq(const RadialField& f) { return gradient_sq(f.grid(), f.values()); }

double norm_h1_sq(const RadialField& f) { return gradient_sq(f) + inner_l2(f, f); }

RadialField ddr(const RadialField& f) {
  const std::size_t n = f.size();
  const double h2 = 2.0 * f.grid().dr();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? f[0] : f[i - 1];
    const double right = i + 1 == n ? -f[n - 1] : f[i + 1];
    out[i] = (right - left) / h2;
  }
  return RadialField(f.grid_ptr(), std::move(out));
}

RadialField schwarz_rearrange(const RadialField& f) {
  const auto& grid = f.grid();
  const std::size_t n = f.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(f[a]) > std::abs(f[b]); });

  std::vector<double> out(n, 0.0);
  std::size_t k = 0;
  double remaining = grid.weight(order[0]);
  for (std::size_t j = 0; j < n; ++j) {
    const double target = grid.weight(j);
    double need = target;
    double acc = 0.0;
    while (need > 0.0 && k < n) {
      const double take = std::min(need, remaining);
      acc += std::abs(f[order[k]]) * take;
      need -= take;
      remaining -= take;
      if (remaining <= 1e-14 * grid.weight(order[k])) {
        ++k;
        if (k < n) remaining = grid.weight(order[k]);
      }
    }
    // Rounding can leave the last cell a sliver short of its weight.
    out[j] = acc / (target - std::max(need, 0.0));
    // Averages of equal values may differ in the last ulp.
    if (j > 0) out[j] = std::min(out[j], out[j - 1]);
  }
  return RadialField(f.grid_ptr(), std::move(out));
}

std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  }
  // dl[i] holds A(i+1, i); it is reused for the second superdiagonal fill-in.
  std::vector<double> dl(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = lower[i + 1];
  auto& d = diag;
  auto& du = upper;
  auto& b = rhs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw std::runtime_error("solve_tridiagonal: singular matrix");
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - fact * tmp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = tmp;
      const double bt = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bt - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) throw std::runtime_error("solve_tridiagonal: singular matrix");
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n >= 2) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t ii = n - 2; ii-- > 0;) {
    x[ii] = (b[ii] - du[ii] * x[ii + 1] - dl[ii] * x[ii + 2]) / d[ii];
  }
  return x;
}

std::vector<double> solve_shifted_laplacian(const RadialGrid& grid, double shift,
                                            std::span<const double> rhs) {
  const std::size_t n = grid.size();
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.weight(i);
    const double c_out = grid.face_coefficient(i);
    const double c_in = i == 0 ? 0.0 : grid.face_coefficient(i - 1);
    if (i + 1 < n) {
      diag[i] = (c_out + c_in) / w + shift;
      upper[i] = -c_out / w;
    } else {
      diag[i] = (2.0 * c_out + c_in) / w + shift;
    }
    if (i > 0) lower[i] = -c_in / w;
  }
  return solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper),
                           std::vector<double>(rhs.begin(), rhs.end()));
}

void write_field_csv(std::ostream& os, const RadialField& f) {
  os << "r,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) os << f.grid().node(i) << ',' << f[i] << '\n';
}

RadialField read_field_csv(std::istream& is, GridPtr grid) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("field csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,value") throw std::runtime_error("field csv: header must be 'r,value'");
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    double r = 0.0, v = 0.0;
    char comma = 0;
    if (!(ls >> r >> comma >> v) || comma != ',') {
      throw std::runtime_error("field csv: malformed row " + std::to_string(row + 2));
    }
    if (row >= grid->size() || std::abs(r - grid->node(row)) > 1e-9 * grid->r_max()) {
      throw std::runtime_error("field csv: node " + std::to_string(row) + " does not match grid");
    }
    values.push_back(v);
    ++row;
  }
  return RadialField(std::move(grid), std::move(values));
}

}  // namespace kglab
