#pragma once

#include "capflow/surface.hpp"

#include <cstdint>

namespace capflow {

/// Spherical cap of radius r centred at r cos(theta) e, e = -e_{n+1}.
struct CapSpec {
  double r = 1.0;
  double theta = M_PI / 3;
};

/// phi = phi_cap + amplitude * eta(beta) * cos(xi_mode * xi), with
/// eta(beta) = sin^p(beta) cos^2(beta) / max(sin^p cos^2), p = beta_profile.
/// eta and eta' vanish at the equator, eta = O(beta^p) at the pole; p >= xi_mode
/// with matching parity keeps the perturbation smooth across the pole.
/// A nonzero `mixture_modes` adds that many extra modes 2..xi_mode+mixture_modes
/// with seeded random weights and phases.
struct PerturbationSpec {
  double amplitude = 0.05;
  int beta_profile = 2;
  int xi_mode = 2;
  int mixture_modes = 0;
  std::uint64_t seed = 1;
};

/// Closed-form cap radius in direction beta: r (-cos(theta) cos(beta) + sqrt(1 - cos^2 sin^2)).
[[nodiscard]] double cap_radius(const CapSpec& spec, double beta);

/// Radius rho of the cap around e through the point at distance `dist` and height
/// `height` above the supporting plane: rho^2 sin^2 = |x|^2 + 2 rho cos(theta) x_{n+1}.
[[nodiscard]] double fitted_cap_radius(double theta, double dist, double height);

[[nodiscard]] double perturbation_profile(int p, double beta);

[[nodiscard]] RadialField cap_phi(const CapSpec& spec, const HalfSphereGrid& grid);

/// Perturbed cap, halving the amplitude until the state is strictly convex.
/// The amplitude finally used is stored in `amplitude_used` when given.
[[nodiscard]] RadialField perturbed_cap(const CapSpec& spec, const PerturbationSpec& pert,
                                        const HalfSphereGrid& grid,
                                        double* amplitude_used = nullptr);

struct VolumeEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo volume of the domain enclosed by the graph and the plane,
/// sampling the bounding box uniformly.
[[nodiscard]] VolumeEstimate mc_volume(const GeometricState& state, std::int64_t samples,
                                       std::uint64_t seed);

} // namespace capflow
