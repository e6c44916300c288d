#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace capflow {

/// One value per node, rows = latitude beta (pole to equator), cols = longitude xi.
using ScalarField = Eigen::ArrayXXd;

/// Latitude-longitude discretization of the closed upper half-sphere.
///
/// Latitudes are uniform, beta_j = (j + 1/2) * d_beta for j = 0..n_beta-1, with
/// d_beta = pi / (2 n_beta - 1) so that the last row sits exactly on the equator
/// beta = pi/2. No node lies on the pole; stencils crossing it use the
/// antipodal row (beta_0, xi + pi). Longitudes are periodic, xi_i = i * d_xi.
/// An axisymmetric grid keeps a single longitude sample.
class HalfSphereGrid {
public:
  HalfSphereGrid(int n_beta, int n_xi);
  static HalfSphereGrid axisymmetric(int n_beta) { return {n_beta, 1}; }

  [[nodiscard]] int n_beta() const { return n_beta_; }
  [[nodiscard]] int n_xi() const { return n_xi_; }
  [[nodiscard]] bool is_axisymmetric() const { return n_xi_ == 1; }
  [[nodiscard]] int boundary_row() const { return n_beta_ - 1; }
  [[nodiscard]] double d_beta() const { return d_beta_; }
  [[nodiscard]] double d_xi() const { return d_xi_; }

  [[nodiscard]] const Eigen::ArrayXd& beta() const { return beta_; }
  [[nodiscard]] const Eigen::ArrayXd& xi() const { return xi_; }
  [[nodiscard]] const Eigen::ArrayXd& sin_beta() const { return sin_beta_; }
  [[nodiscard]] const Eigen::ArrayXd& cos_beta() const { return cos_beta_; }
  /// Latitude quadrature weights for the measure sin(beta) d beta (sum to 1).
  [[nodiscard]] const Eigen::ArrayXd& row_weight() const { return row_weight_; }
  /// Area weights per node, summing to 2 pi.
  [[nodiscard]] ScalarField weights() const;
  [[nodiscard]] double ghost_beta() const { return M_PI / 2 + d_beta_; }

  [[nodiscard]] ScalarField zeros() const { return ScalarField::Zero(n_beta_, n_xi_); }
  /// Index of the longitude xi + pi.
  [[nodiscard]] int antipode(int i) const { return (i + n_xi_ / 2) % n_xi_; }

  bool operator==(const HalfSphereGrid& o) const
  {
    return n_beta_ == o.n_beta_ && n_xi_ == o.n_xi_;
  }

private:
  int n_beta_;
  int n_xi_;
  double d_beta_;
  double d_xi_;
  Eigen::ArrayXd beta_, xi_, sin_beta_, cos_beta_, row_weight_;
};

/// Evaluate f(beta, xi) on every node.
template <typename Fn>
[[nodiscard]] ScalarField sample_field(const HalfSphereGrid& grid, Fn&& f)
{
  ScalarField out(grid.n_beta(), grid.n_xi());
  for (int j = 0; j < grid.n_beta(); ++j)
    for (int i = 0; i < grid.n_xi(); ++i) out(j, i) = f(grid.beta()(j), grid.xi()(i));
  return out;
}

/// Raw coordinate partial derivatives of a field.
struct Partials {
  ScalarField d_b, d_x, d_bb, d_bx, d_xx;
};

/// Second-order centred differences; the pole is closed by the antipodal row.
/// At the equator row the ghost row beyond beta = pi/2 is used when given,
/// otherwise one-sided second-order stencils.
[[nodiscard]] Partials partials(const ScalarField& field, const HalfSphereGrid& grid,
                                const std::optional<Eigen::ArrayXd>& ghost = std::nullopt);

/// Covariant gradient in the orthonormal frame (d_beta, (1/sin beta) d_xi).
struct GradField {
  ScalarField beta, xi;
};

/// Covariant Hessian of the round metric in coordinates (beta, xi).
struct HessField {
  ScalarField bb, bx, xx;
};

/// Hessian components in the orthonormal frame.
struct FrameHessian {
  ScalarField e11, e12, e22;
};

[[nodiscard]] GradField grad_sphere(const ScalarField& field, const HalfSphereGrid& grid,
                                    const std::optional<Eigen::ArrayXd>& ghost = std::nullopt);
[[nodiscard]] HessField hess_sphere(const ScalarField& field, const HalfSphereGrid& grid,
                                    const std::optional<Eigen::ArrayXd>& ghost = std::nullopt);

[[nodiscard]] GradField frame_gradient(const Partials& p, const HalfSphereGrid& grid);
[[nodiscard]] FrameHessian frame_hessian(const Partials& p, const HalfSphereGrid& grid);
[[nodiscard]] FrameHessian to_frame(const HessField& h, const HalfSphereGrid& grid);

/// Round-metric Laplacian (trace of the covariant Hessian).
[[nodiscard]] ScalarField laplacian_sphere(const ScalarField& field, const HalfSphereGrid& grid,
                                           const std::optional<Eigen::ArrayXd>& ghost = std::nullopt);

/// Quadrature of field over the half-sphere (area form sin beta d beta d xi).
[[nodiscard]] double integrate(const ScalarField& field, const HalfSphereGrid& grid);

/// Periodic trapezoid rule over the equator, weight d_xi per sample.
[[nodiscard]] double boundary_integrate(const Eigen::ArrayXd& values, const HalfSphereGrid& grid);

/// Bilinear interpolation at an arbitrary direction (beta in [0, pi/2]).
[[nodiscard]] double interpolate(const ScalarField& field, const HalfSphereGrid& grid, double beta,
                                 double xi);

/// Fourier truncation in xi near the pole: row j keeps modes
/// the modes m >= 1 with 2 sin(m d_xi / 2) / (sin(beta_j) d_xi) <= 2 / d_beta (at least
/// m = 1), so the xi difference operator is never stiffer than the latitude one.
/// Rows far enough from the pole are untouched.
class PolarFilter {
public:
  explicit PolarFilter(const HalfSphereGrid& grid);
  /// Drop the unresolved modes of every truncated row.
  void apply(ScalarField& field) const;
  /// Rebuild the unresolved modes of every truncated row from the first row that
  /// resolves them, using the regularity of smooth fields at the pole: the mode-m
  /// coefficient scales like sin^m(beta).
  void regularize(ScalarField& field) const;
  [[nodiscard]] int max_mode(int row) const { return max_mode_[row]; }
  /// Smallest effective node spacing after filtering.
  [[nodiscard]] double min_spacing() const { return min_spacing_; }

private:
  int n_xi_;
  std::vector<int> max_mode_;
  std::vector<Eigen::MatrixXd> projection_; // per truncated row, empty otherwise
  Eigen::MatrixXd basis_; // orthonormal real Fourier basis, column 2m-1 / 2m = cos / sin of mode m
  std::vector<int> source_row_; // first row resolving each mode
  double min_spacing_;
  Eigen::ArrayXd sin_beta_;
};

} // namespace capflow
