#include "capflow/scenarios.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace capflow {

double cap_radius(const CapSpec& spec, double beta)
{
  const double c = std::cos(spec.theta);
  const double sb = std::sin(beta);
  return spec.r * (-c * std::cos(beta) + std::sqrt(1.0 - c * c * sb * sb));
}

double fitted_cap_radius(double theta, double dist, double height)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return (c * height + std::sqrt(c * c * height * height + s * s * dist * dist)) / (s * s);
}

double perturbation_profile(int p, double beta)
{
  // max of sin^p cos^2 is at tan^2 = p / 2
  const double bmax = p == 0 ? 0.0 : std::atan(std::sqrt(0.5 * p));
  const double peak = std::pow(std::sin(bmax), p) * std::pow(std::cos(bmax), 2);
  return std::pow(std::sin(beta), p) * std::pow(std::cos(beta), 2) / peak;
}

namespace {

void check_spec(const CapSpec& spec)
{
  if (!(spec.r > 0)) throw std::invalid_argument("cap spec: radius must be positive");
  if (!(spec.theta > 0 && spec.theta < M_PI))
    throw std::invalid_argument("cap spec: theta must lie in (0, pi)");
}

int profile_for_mode(int m, int p)
{
  int q = std::max(p, std::max(m, m == 0 ? 0 : 1));
  if ((q - m) % 2 != 0) ++q;
  return q;
}

RadialField from_function(const HalfSphereGrid& grid, double theta,
                          const std::function<double(double, double)>& phi)
{
  ScalarField values = sample_field(grid, phi);
  Eigen::ArrayXd ghost(grid.n_xi());
  for (int i = 0; i < grid.n_xi(); ++i) ghost(i) = phi(grid.ghost_beta(), grid.xi()(i));
  return {grid, std::move(values), std::move(ghost), theta};
}

} // namespace

RadialField cap_phi(const CapSpec& spec, const HalfSphereGrid& grid)
{
  check_spec(spec);
  // The closed form continues smoothly past the equator, which fills the ghost row.
  return from_function(grid, spec.theta,
                       [&](double beta, double) { return std::log(cap_radius(spec, beta)); });
}

RadialField perturbed_cap(const CapSpec& spec, const PerturbationSpec& pert,
                          const HalfSphereGrid& grid, double* amplitude_used)
{
  check_spec(spec);
  const int m = pert.xi_mode;
  const int p = pert.beta_profile;
  if (m < 0) throw std::invalid_argument("perturbation: xi_mode must be >= 0");
  if (p < m || (p - m) % 2 != 0)
    throw std::invalid_argument("perturbation: beta_profile " + std::to_string(p) +
                                " is not regular at the pole for mode " + std::to_string(m));
  if (!grid.is_axisymmetric() && m > grid.n_xi() / 2)
    throw std::invalid_argument("perturbation: mode exceeds the longitude resolution");
  if (grid.is_axisymmetric() && (m != 0 || pert.mixture_modes != 0))
    throw std::invalid_argument("perturbation: axisymmetric grids only admit mode 0");

  struct Term {
    int mode, profile;
    double weight, phase;
  };
  std::vector<Term> terms{{m, p, 1.0, 0.0}};
  std::mt19937_64 rng(pert.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int extra = 0; extra < pert.mixture_modes; ++extra) {
    const int mode = m + 1 + extra;
    if (mode > grid.n_xi() / 2) break;
    terms.push_back({mode, profile_for_mode(mode, p), 0.5 * unit(rng), M_PI * unit(rng)});
  }

  double amplitude = pert.amplitude;
  for (int attempt = 0; attempt <= 20; ++attempt) {
    auto phi = [&](double beta, double xi) {
      double d = 0.0;
      for (const Term& t : terms)
        d += t.weight * perturbation_profile(t.profile, beta) * std::cos(t.mode * xi + t.phase);
      return std::log(cap_radius(spec, beta)) + amplitude * d;
    };
    RadialField state = from_function(grid, spec.theta, phi);
    if (amplitude == 0.0 || geometry_from_phi(state).is_convex()) {
      if (amplitude_used) *amplitude_used = amplitude;
      return state;
    }
    amplitude *= 0.5;
  }
  throw std::runtime_error("perturbed_cap: no strictly convex state after 20 amplitude halvings");
}

VolumeEstimate mc_volume(const GeometricState& state, std::int64_t samples, std::uint64_t seed)
{
  if (samples <= 0) throw std::invalid_argument("mc_volume: sample count must be positive");
  if (!(state.support.minCoeff() > 0))
    throw std::invalid_argument("mc_volume: state is not star-shaped");
  const double rmax = state.phi.exp().maxCoeff();
  const double box = (2 * rmax) * (2 * rmax) * rmax;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> horiz(-rmax, rmax);
  std::uniform_real_distribution<double> vert(0.0, rmax);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double x = horiz(rng), y = horiz(rng), z = vert(rng);
    const double dist = std::sqrt(x * x + y * y + z * z);
    if (dist >= rmax) continue;
    if (dist == 0.0) {
      ++hits;
      continue;
    }
    const double beta = std::acos(std::min(1.0, z / dist));
    const double xi = std::atan2(y, x);
    if (dist < std::exp(interpolate(state.phi, state.grid, beta, xi))) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  return {box * frac, box * std::sqrt(frac * (1 - frac) / static_cast<double>(samples))};
}

} // namespace capflow
