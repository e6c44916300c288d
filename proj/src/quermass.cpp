#include "capflow/quermass.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace capflow {

namespace {

// int_0^theta sin^m(s) ds by the standard reduction formula.
double sine_power_integral(int m, double theta)
{
  if (m == 0) return theta;
  if (m == 1) return 1.0 - std::cos(theta);
  return -std::pow(std::sin(theta), m - 1) * std::cos(theta) / m +
         (m - 1.0) / m * sine_power_integral(m - 2, theta);
}

} // namespace

double sphere_area(int m)
{
  return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

CapConstants cap_constants(double theta, int n)
{
  if (!(theta > 0.0 && theta < M_PI))
    throw std::invalid_argument("cap_constants: theta must lie in (0, pi), got " +
                                std::to_string(theta));
  if (n < 1) throw std::invalid_argument("cap_constants: n must be >= 1");
  CapConstants c;
  c.n = n;
  c.theta = theta;
  const double w = sphere_area(n - 1);
  c.omega_n = sphere_area(n);
  // Slice volumes of the n-ball of radius sin(s) along the axis t = cos(s).
  c.b_theta = w / n * sine_power_integral(n + 1, theta);
  c.cap_area = w * sine_power_integral(n - 1, theta);
  c.omega_theta = c.cap_area - std::cos(theta) * w / n * std::pow(std::sin(theta), n);
  return c;
}

std::vector<double> assemble_quermass(const QuermassRaw& raw, double theta, int n)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> V(n + 2);
  V[0] = raw.volume;
  V[1] = (raw.area - c * raw.wetted_area) / (n + 1);
  for (int k = 1; k <= n; ++k)
    V[k + 1] = (raw.int_H[k] - c * std::pow(s, k) / n * raw.int_H_bdry[k - 1]) / (n + 1);
  return V;
}

QuermassVector quermass_all(const GeometricState& state)
{
  constexpr int n = GeometricState::n;
  const BoundarySummary b = boundary_geometry(state);
  QuermassRaw raw;
  raw.area = state.area_weight.sum();
  raw.wetted_area = b.enclosed_area;
  raw.boundary_length = b.length;
  // Divergence theorem; the flat face has <x, e_{n+1}> = 0 and contributes nothing.
  raw.volume = (state.support * state.area_weight).sum() / (n + 1);
  raw.int_H.resize(n + 1);
  for (int k = 0; k <= n; ++k) raw.int_H[k] = (state.H(k) * state.area_weight).sum();
  // For a curve in the plane: H_0 = 1 and H_1 = planar curvature.
  raw.int_H_bdry = {b.length,
                    boundary_integrate(b.curvature * state.boundary_length_element, state.grid)};

  QuermassVector q;
  q.n = n;
  q.theta = state.theta;
  q.V = assemble_quermass(raw, state.theta, n);
  q.raw = std::move(raw);
  return q;
}

double minkowski_residual(const GeometricState& state, int k)
{
  constexpr int n = GeometricState::n;
  if (k < 1 || k > n)
    throw std::out_of_range("minkowski_residual: k=" + std::to_string(k) + " outside 1.." +
                            std::to_string(n));
  const double c = std::cos(state.theta);
  const double lhs = (state.H(k - 1) * (1.0 - c * state.nu_vert) * state.area_weight).sum();
  const double rhs = (state.H(k) * state.support * state.area_weight).sum();
  const double scale = std::abs(rhs);
  if (scale < 1e-300) return lhs - rhs;
  return (lhs - rhs) / scale;
}

double gauss_bonnet_check(const GeometricState& state)
{
  constexpr int n = GeometricState::n;
  const double total = (state.H(n) * state.area_weight).sum();
  return total - cap_constants(state.theta, n).cap_area;
}

} // namespace capflow
