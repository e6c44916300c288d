#include "capflow/surface.hpp"

#include <cmath>
#include <sstream>

namespace capflow {

RadialField::RadialField(HalfSphereGrid g, ScalarField p, Eigen::ArrayXd gh, double contact_angle)
    : grid(std::move(g)), phi(std::move(p)), ghost(std::move(gh)), theta(contact_angle)
{
  if (phi.rows() != grid.n_beta() || phi.cols() != grid.n_xi())
    throw std::invalid_argument("RadialField: phi shape does not match the grid");
  if (ghost.size() != grid.n_xi())
    throw std::invalid_argument("RadialField: ghost row has the wrong length");
  if (!(theta > 0.0 && theta < M_PI))
    throw std::invalid_argument("RadialField: contact angle must lie in (0, pi)");
  if (!phi.allFinite() || !ghost.allFinite())
    throw std::invalid_argument("RadialField: phi is not finite");
}

ScalarField GeometricState::H(int k) const
{
  ScalarField out(grid.n_beta(), grid.n_xi());
  for (int j = 0; j < grid.n_beta(); ++j)
    for (int i = 0; i < grid.n_xi(); ++i) out(j, i) = normalized_H(kappa_at(j, i), k);
  return out;
}

GeometricState geometry_from_phi(const RadialField& state)
{
  const HalfSphereGrid& grid = state.grid;
  const int nb = grid.n_beta();
  const int nx = grid.n_xi();
  const Partials d = partials(state.phi, grid, state.ghost);
  const GradField g = frame_gradient(d, grid);
  const FrameHessian hs = frame_hessian(d, grid);

  GeometricState s{.grid = grid, .theta = state.theta, .phi = state.phi};
  s.grad1 = g.beta;
  s.grad2 = g.xi;
  s.v = (1.0 + g.beta.square() + g.xi.square()).sqrt();
  const ScalarField r = state.phi.exp();
  s.support = r / s.v;
  s.nu_vert = (g.beta.colwise() * grid.sin_beta()).colwise() + grid.cos_beta();
  s.nu_vert /= s.v;
  s.area_weight = r.square() * s.v * grid.weights();

  for (auto& w : s.weingarten) w.resize(nb, nx);
  for (auto& w : s.shape) w.resize(nb, nx);
  for (auto& k : s.kappa) k.resize(nb, nx);

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double p1 = g.beta(j, i), p2 = g.xi(j, i);
      const double h11 = hs.e11(j, i), h12 = hs.e12(j, i), h22 = hs.e22(j, i);
      if (!std::isfinite(p1 + p2 + h11 + h12 + h22))
        throw GeometryError("geometry_from_phi: non-finite derivatives", j, i);
      const double vv = s.v(j, i);
      const double scale = 1.0 / (r(j, i) * vv);
      // h = scale (I - G^{-1} Hess) with G^{-1} = I - p p^T / v^2.
      const double iv2 = 1.0 / (vv * vv);
      const double q1 = p1 * h11 + p2 * h12, q2 = p1 * h12 + p2 * h22; // p^T Hess
      s.weingarten[0](j, i) = scale * (1.0 - h11 + p1 * q1 * iv2);
      s.weingarten[1](j, i) = scale * (-h12 + p1 * q2 * iv2);
      s.weingarten[2](j, i) = scale * (-h12 + p2 * q1 * iv2);
      s.weingarten[3](j, i) = scale * (1.0 - h22 + p2 * q2 * iv2);
      // Symmetrized: scale (I - R Hess R) with R = G^{-1/2} = I - w p p^T.
      const double w = 1.0 / (vv * (vv + 1));
      const double pq = p1 * q1 + p2 * q2; // p^T Hess p
      const double a11 = h11 - 2 * w * p1 * q1 + w * w * p1 * p1 * pq;
      const double a12 = h12 - w * (p1 * q2 + p2 * q1) + w * w * p1 * p2 * pq;
      const double a22 = h22 - 2 * w * p2 * q2 + w * w * p2 * p2 * pq;
      const double a = scale * (1.0 - a11), b = -scale * a12, c = scale * (1.0 - a22);
      s.shape[0](j, i) = a;
      s.shape[1](j, i) = b;
      s.shape[2](j, i) = c;
      const double mean = 0.5 * (a + c);
      const double half = 0.5 * (a - c);
      const double rad = std::sqrt(half * half + b * b);
      s.kappa[0](j, i) = mean - rad;
      s.kappa[1](j, i) = mean + rad;
    }
  }

  // Boundary curve in the supporting plane, in polar form.
  const int jb = grid.boundary_row();
  s.boundary_rho = r.row(jb).transpose();
  const Eigen::ArrayXd& rho = s.boundary_rho;
  Eigen::ArrayXd rho_xx = Eigen::ArrayXd::Zero(nx);
  s.boundary_rho_xi = Eigen::ArrayXd::Zero(nx);
  if (nx > 1) {
    const double dx = grid.d_xi();
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
      s.boundary_rho_xi(i) = (rho(ip) - rho(im)) / (2 * dx);
      rho_xx(i) = (rho(ip) - 2 * rho(i) + rho(im)) / (dx * dx);
    }
  }
  const Eigen::ArrayXd& rx = s.boundary_rho_xi;
  const Eigen::ArrayXd q = rho.square() + rx.square();
  s.boundary_length_element = q.sqrt();
  s.boundary_curvature = (rho.square() + 2 * rx.square() - rho * rho_xx) / q.pow(1.5);
  return s;
}

BoundarySummary boundary_geometry(const GeometricState& state)
{
  const HalfSphereGrid& grid = state.grid;
  for (int i = 0; i < grid.n_xi(); ++i)
    if (!(state.boundary_rho(i) > 0))
      throw GeometryError("boundary_geometry: non-positive boundary radius",
                          grid.boundary_row(), i);
  BoundarySummary b;
  b.length = boundary_integrate(state.boundary_length_element, grid);
  b.enclosed_area = 0.5 * boundary_integrate(state.boundary_rho.square(), grid);
  b.curvature = state.boundary_curvature;
  return b;
}

ScalarField capillary_speed(const GeometricState& state, int l)
{
  const int nb = state.grid.n_beta();
  const int nx = state.grid.n_xi();
  const double c = std::cos(state.theta);
  ScalarField f(nb, nx);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nb; ++j) {
      const Eigen::Vector2d k = state.kappa_at(j, i);
      if (!cone_member(k, l)) {
        std::ostringstream os;
        os << "capillary_speed: curvature (" << k(0) << ", " << k(1)
           << ") left Gamma_+^" << l << " at node (" << j << ", " << i << ")";
        throw DomainError(os.str());
      }
      const double F = normalized_H(k, l) / normalized_H(k, l - 1);
      f(j, i) = (1.0 - c * state.nu_vert(j, i)) / F - state.support(j, i);
    }
  }
  return f;
}

ScalarField static_cap_residual(const GeometricState& state, double r)
{
  return 1.0 - std::cos(state.theta) * state.nu_vert - state.support / r;
}

Eigen::ArrayXd boundary_condition_residual(const RadialField& state)
{
  const HalfSphereGrid& grid = state.grid;
  const int jb = grid.boundary_row();
  const int nx = grid.n_xi();
  const double h = grid.d_beta();
  Eigen::ArrayXd res(nx);
  for (int i = 0; i < nx; ++i) {
    const double db = (state.ghost(i) - state.phi(jb - 1, i)) / (2 * h);
    double dx = 0.0;
    if (nx > 1) {
      dx = (state.phi(jb, (i + 1) % nx) - state.phi(jb, (i + nx - 1) % nx)) / (2 * grid.d_xi());
    }
    res(i) = db - std::cos(state.theta) * std::sqrt(1.0 + db * db + dx * dx);
  }
  return res;
}

} // namespace capflow
