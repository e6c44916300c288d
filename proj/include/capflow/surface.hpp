#pragma once

#include "capflow/halfsphere.hpp"
#include "capflow/symfun.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace capflow {

/// Non-finite or inadmissible geometry at a grid node.
class GeometryError : public std::runtime_error {
public:
  GeometryError(const std::string& what, int row, int col)
      : std::runtime_error(what + " at node (" + std::to_string(row) + ", " +
                           std::to_string(col) + ")"),
        row_(row), col_(col)
  {
  }
  [[nodiscard]] int row() const { return row_; }
  [[nodiscard]] int col() const { return col_; }

private:
  int row_, col_;
};

/// Radial graph Sigma = { exp(phi(X)) X : X in the closed upper half-sphere }.
/// `ghost` is the row beyond the equator that carries the boundary condition.
struct RadialField {
  HalfSphereGrid grid;
  ScalarField phi;
  Eigen::ArrayXd ghost;
  double theta;

  RadialField(HalfSphereGrid g, ScalarField p, Eigen::ArrayXd gh, double contact_angle);
};

/// Pointwise extrinsic geometry of a radial graph (n = 2). Tensor components
/// are taken in the orthonormal round frame (d_beta, (1/sin beta) d_xi).
struct GeometricState {
  static constexpr int n = 2;

  HalfSphereGrid grid;
  double theta = 0.0;
  ScalarField phi;
  ScalarField grad1, grad2;          // covariant gradient of phi
  ScalarField v;                     // sqrt(1 + |grad phi|^2)
  ScalarField support;               // <x, nu>
  ScalarField nu_vert;               // <nu, e_{n+1}>
  std::array<ScalarField, 4> weingarten; // h^i_j, entries (11, 12, 21, 22)
  std::array<ScalarField, 3> shape;      // metric-symmetrized Weingarten (11, 12, 22)
  std::array<ScalarField, 2> kappa;      // ascending principal curvatures
  ScalarField area_weight;               // dA per node

  // Boundary curve rho(xi) = exp(phi(pi/2, xi)) in the supporting plane.
  Eigen::ArrayXd boundary_rho;
  Eigen::ArrayXd boundary_rho_xi;
  Eigen::ArrayXd boundary_length_element; // ds / d xi
  Eigen::ArrayXd boundary_curvature;

  /// <nu, e> for e = -e_{n+1}.
  [[nodiscard]] ScalarField nu_e() const { return -nu_vert; }
  [[nodiscard]] Eigen::Vector2d kappa_at(int j, int i) const
  {
    return {kappa[0](j, i), kappa[1](j, i)};
  }
  /// Normalized mean curvature H_k at every node.
  [[nodiscard]] ScalarField H(int k) const;
  [[nodiscard]] double min_kappa() const { return kappa[0].minCoeff(); }
  [[nodiscard]] bool is_convex() const { return min_kappa() > 0.0; }
};

[[nodiscard]] GeometricState geometry_from_phi(const RadialField& state);

struct BoundarySummary {
  double length = 0.0;          // |d Sigma|
  double enclosed_area = 0.0;   // area of the wetted region in the plane
  Eigen::ArrayXd curvature;     // planar curvature of d Sigma
};

[[nodiscard]] BoundarySummary boundary_geometry(const GeometricState& state);

/// f = (1 + cos(theta) <nu, e>) / F - <x, nu> with F = H_l / H_{l-1}.
/// Throws DomainError naming the first node that leaves Gamma_+^l.
[[nodiscard]] ScalarField capillary_speed(const GeometricState& state, int l = GeometricState::n);

/// 1 + cos(theta) <nu, e> - <x, nu> / r, which vanishes on the cap of radius r.
[[nodiscard]] ScalarField static_cap_residual(const GeometricState& state, double r);

/// nabla_beta phi - cos(theta) v at the equator row.
[[nodiscard]] Eigen::ArrayXd boundary_condition_residual(const RadialField& state);

} // namespace capflow
