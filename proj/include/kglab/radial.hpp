#pragma once

/// @file radial.hpp
/// @brief Cell-centered radial grids on R^3, radial fields and the discrete
/// operators acting on them (Laplacian, quadrature, H^1 norm, rearrangement).
///
/// Nodes sit at r_i = (i + 1/2) dr, so r = 0 is a cell face. Quadrature is the
/// midpoint rule with weights 4*pi*r_i^2*dr. The Laplacian uses an even
/// reflection across the origin and a homogeneous Dirichlet condition on the
/// outer face r = r_max. It is exactly symmetric with respect to the quadrature
/// weights, and gradient_sq() is the matching quadratic form, so
///
///     integrate(g * laplacian3d(f)) == -<grad f, grad g>   (to round-off).

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kglab {

/// Surface measure of S^2; integrate(f) = kOmega3 * int f r^2 dr.
inline constexpr double kOmega3 = 4.0 * std::numbers::pi;

/// Thrown when two fields that must share a grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("radial fields live on different grids") {}
};

class RadialGrid {
 public:
  static constexpr std::size_t kMinNodes = 16;

  RadialGrid(double r_max, std::size_t n);

  double r_max() const { return r_max_; }
  std::size_t size() const { return n_; }
  double dr() const { return dr_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }

  /// Midpoint quadrature weight r_i^2 dr (without the 4*pi factor).
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

  /// Flux coefficient r_i r_{i+1} / dr between cells i and i+1; for
  /// i = n-1 the virtual node r_n = r_max + dr/2 is used.
  double face_coefficient(std::size_t i) const { return faces_[i]; }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.n_ == b.n_ && a.r_max_ == b.r_max_;
  }

 private:
  double r_max_;
  std::size_t n_;
  double dr_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> faces_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Builds a cell-centered grid. Throws std::invalid_argument for r_max <= 0,
/// non-finite r_max or n < 16.
GridPtr build_grid(double r_max, std::size_t n);

/// A radial function sampled at the nodes of a grid. Values are always finite.
class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values);

  static RadialField zeros(GridPtr grid);
  static RadialField sample(GridPtr grid, const std::function<double(double)>& fn);

  const GridPtr& grid_ptr() const { return grid_; }
  const RadialGrid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// max_i |f_i|
  double sup_norm() const;

  bool same_grid(const RadialField& other) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const RadialField& a, const RadialField& b);

// Pointwise arithmetic.
RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(double c, const RadialField& f);
RadialField operator*(const RadialField& a, const RadialField& b);
RadialField map(const RadialField& f, const std::function<double(double)>& fn);

/// Discrete Laplacian of a radial function in R^3 (u_rr + 2 u_r / r).
RadialField laplacian3d(const RadialField& f);

/// int_{R^3} f dx via the midpoint rule.
double integrate(const RadialField& f);

double inner_l2(const RadialField& f, const RadialField& g);

/// Discrete int |grad f|^2 dx; equals -integrate(f * laplacian3d(f)).
double gradient_sq(const RadialField& f);

/// ||f||_{H^1}^2 = gradient_sq(f) + ||f||_{L^2}^2.
double norm_h1_sq(const RadialField& f);

/// Centered radial derivative with the same ghost values as laplacian3d.
RadialField ddr(const RadialField& f);

/// Decreasing rearrangement of |f| with respect to the measure r^2 dr.
///
/// Cell values of |f| are sorted in decreasing order and laid out along the
/// measure axis; every target cell (in increasing r) receives the
/// measure-weighted average of the sorted values covering its own weight.
RadialField schwarz_rearrange(const RadialField& f);

// Span-level kernels used by the integrators; out must have grid.size() entries.
void laplacian3d_into(const RadialGrid& grid, std::span<const double> f, std::span<double> out);
double weighted_sum(const RadialGrid& grid, std::span<const double> f);
double gradient_sq(const RadialGrid& grid, std::span<const double> f);

/// Solves the tridiagonal system (-laplacian3d + shift) x = rhs.
std::vector<double> solve_shifted_laplacian(const RadialGrid& grid, double shift,
                                            std::span<const double> rhs);

/// Solves a general tridiagonal system with partial pivoting. lower[0] and
/// upper[n-1] are ignored. Throws std::runtime_error on a singular matrix.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

// CSV with mandatory header "r,value".
void write_field_csv(std::ostream& os, const RadialField& f);
RadialField read_field_csv(std::istream& is, GridPtr grid);

}  // namespace kglab
