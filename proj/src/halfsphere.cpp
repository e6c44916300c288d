#include "capflow/halfsphere.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace capflow {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int m, Eigen::VectorXd& x, Eigen::VectorXd& w)
{
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w = 2 * es.eigenvectors().row(0).transpose().array().square();
}

// Adds to `weight` the integrals over [a, b] of sin(beta) times the Lagrange
// basis polynomials of `nodes`.
void add_panel(const Eigen::ArrayXd& beta, const std::vector<int>& nodes, double a, double b,
               Eigen::ArrayXd& weight)
{
  Eigen::VectorXd gx, gw;
  gauss_legendre(12, gx, gw);
  for (int q = 0; q < gx.size(); ++q) {
    const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx(q);
    const double wq = 0.5 * (b - a) * gw(q) * std::sin(t);
    for (int u : nodes) {
      double basis = 1.0;
      for (int v : nodes)
        if (v != u) basis *= (t - beta(v)) / (beta(u) - beta(v));
      weight(u) += wq * basis;
    }
  }
}

// Periodic xi-derivatives of every row of a (rows x n_xi) block.
void xi_derivatives(const Eigen::ArrayXXd& e, double dxi, Eigen::ArrayXXd& dx, Eigen::ArrayXXd& dxx)
{
  const Eigen::Index n = e.cols();
  dx.setZero(e.rows(), n);
  dxx.setZero(e.rows(), n);
  if (n == 1) return;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip = (i + 1) % n;
    const Eigen::Index im = (i + n - 1) % n;
    dx.col(i) = (e.col(ip) - e.col(im)) / (2 * dxi);
    dxx.col(i) = (e.col(ip) - 2 * e.col(i) + e.col(im)) / (dxi * dxi);
  }
}

} // namespace

HalfSphereGrid::HalfSphereGrid(int n_beta, int n_xi) : n_beta_(n_beta), n_xi_(n_xi)
{
  if (n_beta < 16)
    throw std::invalid_argument("HalfSphereGrid: n_beta must be >= 16, got " +
                                std::to_string(n_beta));
  if (n_xi != 1 && (n_xi < 4 || n_xi % 2 != 0))
    throw std::invalid_argument("HalfSphereGrid: n_xi must be 1 or an even number >= 4, got " +
                                std::to_string(n_xi));
  d_beta_ = M_PI / (2.0 * n_beta - 1.0);
  d_xi_ = 2 * M_PI / n_xi;
  beta_.resize(n_beta);
  for (int j = 0; j < n_beta; ++j) beta_(j) = (j + 0.5) * d_beta_;
  beta_(n_beta - 1) = M_PI / 2;
  xi_ = Eigen::ArrayXd::LinSpaced(n_xi, 0.0, d_xi_ * (n_xi - 1));
  sin_beta_ = beta_.sin();
  cos_beta_ = beta_.cos();
  cos_beta_(n_beta - 1) = 0.0;

  // Product integration of the piecewise-quadratic interpolant against sin(beta),
  // on panels of three rows (the last one four rows when the count is even). The
  // first panel's polynomial also covers the cap [0, beta_0] around the pole.
  row_weight_ = Eigen::ArrayXd::Zero(n_beta);
  add_panel(beta_, {0, 1, 2}, 0.0, beta_(0), row_weight_);
  int j = 0;
  while (j < n_beta - 1) {
    std::vector<int> nodes;
    const int len = (n_beta - 1 - j == 3) ? 3 : 2;
    for (int k = 0; k <= len; ++k) nodes.push_back(j + k);
    add_panel(beta_, nodes, beta_(j), beta_(j + len), row_weight_);
    j += len;
  }
}

ScalarField HalfSphereGrid::weights() const
{
  return (row_weight_ * d_xi_).replicate(1, n_xi_);
}

Partials partials(const ScalarField& field, const HalfSphereGrid& grid,
                  const std::optional<Eigen::ArrayXd>& ghost)
{
  const int nb = grid.n_beta();
  const int nx = grid.n_xi();
  const double h = grid.d_beta();
  if (field.rows() != nb || field.cols() != nx)
    throw std::invalid_argument("partials: field shape does not match the grid");
  if (ghost && ghost->size() != nx)
    throw std::invalid_argument("partials: ghost row has the wrong length");

  // Extended rows: 0 = antipodal pole row, 1..nb = field, nb+1 = equator ghost.
  Eigen::ArrayXXd e(nb + 2, nx);
  for (int i = 0; i < nx; ++i) e(0, i) = field(0, grid.antipode(i));
  e.middleRows(1, nb) = field;
  if (ghost)
    e.row(nb + 1) = ghost->transpose();
  else
    e.row(nb + 1).setZero();

  Eigen::ArrayXXd ex, exx;
  xi_derivatives(e, grid.d_xi(), ex, exx);

  Partials p;
  p.d_b.resize(nb, nx);
  p.d_bb.resize(nb, nx);
  p.d_bx.resize(nb, nx);
  p.d_x = ex.middleRows(1, nb);
  p.d_xx = exx.middleRows(1, nb);

  const int interior_end = ghost ? nb : nb - 1; // rows [0, interior_end) use centred stencils
  for (int j = 0; j < interior_end; ++j) {
    const int r = j + 1;
    p.d_b.row(j) = (e.row(r + 1) - e.row(r - 1)) / (2 * h);
    p.d_bb.row(j) = (e.row(r + 1) - 2 * e.row(r) + e.row(r - 1)) / (h * h);
    p.d_bx.row(j) = (ex.row(r + 1) - ex.row(r - 1)) / (2 * h);
  }
  if (!ghost) {
    const int r = nb; // extended index of boundary row
    p.d_b.row(nb - 1) = (3 * e.row(r) - 4 * e.row(r - 1) + e.row(r - 2)) / (2 * h);
    p.d_bb.row(nb - 1) =
        (2 * e.row(r) - 5 * e.row(r - 1) + 4 * e.row(r - 2) - e.row(r - 3)) / (h * h);
    p.d_bx.row(nb - 1) = (3 * ex.row(r) - 4 * ex.row(r - 1) + ex.row(r - 2)) / (2 * h);
  }
  return p;
}

GradField frame_gradient(const Partials& p, const HalfSphereGrid& grid)
{
  const Eigen::ArrayXd inv_sin = grid.sin_beta().inverse();
  return {p.d_b, p.d_x.colwise() * inv_sin};
}

FrameHessian frame_hessian(const Partials& p, const HalfSphereGrid& grid)
{
  const Eigen::ArrayXd inv_sin = grid.sin_beta().inverse();
  const Eigen::ArrayXd cot = grid.cos_beta() * inv_sin;
  FrameHessian h;
  h.e11 = p.d_bb;
  h.e12 = (p.d_bx - p.d_x.colwise() * cot).colwise() * inv_sin;
  h.e22 = p.d_xx.colwise() * inv_sin.square() + p.d_b.colwise() * cot;
  return h;
}

FrameHessian to_frame(const HessField& h, const HalfSphereGrid& grid)
{
  const Eigen::ArrayXd inv_sin = grid.sin_beta().inverse();
  return {h.bb, h.bx.colwise() * inv_sin, h.xx.colwise() * inv_sin.square()};
}

GradField grad_sphere(const ScalarField& field, const HalfSphereGrid& grid,
                      const std::optional<Eigen::ArrayXd>& ghost)
{
  return frame_gradient(partials(field, grid, ghost), grid);
}

HessField hess_sphere(const ScalarField& field, const HalfSphereGrid& grid,
                      const std::optional<Eigen::ArrayXd>& ghost)
{
  const Partials p = partials(field, grid, ghost);
  const Eigen::ArrayXd cot = grid.cos_beta() / grid.sin_beta();
  const Eigen::ArrayXd sc = grid.sin_beta() * grid.cos_beta();
  HessField h;
  h.bb = p.d_bb;
  h.bx = p.d_bx - p.d_x.colwise() * cot;
  h.xx = p.d_xx + p.d_b.colwise() * sc;
  return h;
}

ScalarField laplacian_sphere(const ScalarField& field, const HalfSphereGrid& grid,
                             const std::optional<Eigen::ArrayXd>& ghost)
{
  const FrameHessian h = frame_hessian(partials(field, grid, ghost), grid);
  return h.e11 + h.e22;
}

double integrate(const ScalarField& field, const HalfSphereGrid& grid)
{
  return (field.rowwise().sum() * grid.row_weight()).sum() * grid.d_xi();
}

double boundary_integrate(const Eigen::ArrayXd& values, const HalfSphereGrid& grid)
{
  if (values.size() != grid.n_xi())
    throw std::invalid_argument("boundary_integrate: expected one value per longitude");
  return values.sum() * grid.d_xi();
}

double interpolate(const ScalarField& field, const HalfSphereGrid& grid, double beta, double xi)
{
  const int nb = grid.n_beta();
  const int nx = grid.n_xi();
  const double h = grid.d_beta();
  xi = std::fmod(xi, 2 * M_PI);
  if (xi < 0) xi += 2 * M_PI;

  auto along_xi = [&](int row, double x) {
    if (nx == 1) return field(row, 0);
    const double s = x / grid.d_xi();
    const int i0 = static_cast<int>(std::floor(s)) % nx;
    const double t = s - std::floor(s);
    return (1 - t) * field(row, i0) + t * field(row, (i0 + 1) % nx);
  };

  // Position in units of rows; row 0 is at 0.5 h.
  const double s = beta / h - 0.5;
  if (s < 0) {
    // Between the antipodal row (at -beta_0) and row 0.
    const double w = (beta + grid.beta()(0)) / (2 * grid.beta()(0));
    return (1 - w) * along_xi(0, xi + M_PI) + w * along_xi(0, xi);
  }
  int j0 = static_cast<int>(std::floor(s));
  if (j0 >= nb - 1) return along_xi(nb - 1, xi);
  const double t = (beta - grid.beta()(j0)) / (grid.beta()(j0 + 1) - grid.beta()(j0));
  return (1 - t) * along_xi(j0, xi) + t * along_xi(j0 + 1, xi);
}

PolarFilter::PolarFilter(const HalfSphereGrid& grid)
    : n_xi_(grid.n_xi()), sin_beta_(grid.sin_beta())
{
  const int nb = grid.n_beta();
  const int nyquist = n_xi_ / 2;
  max_mode_.assign(nb, nyquist);
  projection_.resize(nb);
  min_spacing_ = grid.d_beta();
  if (n_xi_ == 1) return;

  basis_.resize(n_xi_, n_xi_);
  basis_.col(0).setConstant(std::sqrt(1.0 / n_xi_));
  for (int m = 1; 2 * m - 1 < n_xi_; ++m)
    for (int i = 0; i < n_xi_; ++i) {
      const double x = m * grid.xi()(i);
      if (2 * m == n_xi_) {
        basis_(i, 2 * m - 1) = std::sqrt(1.0 / n_xi_) * std::cos(x);
      } else {
        basis_(i, 2 * m - 1) = std::sqrt(2.0 / n_xi_) * std::cos(x);
        basis_(i, 2 * m) = std::sqrt(2.0 / n_xi_) * std::sin(x);
      }
    }

  source_row_.assign(nyquist + 1, 0);
  std::vector<bool> found(nyquist + 1, false);
  for (int j = 0; j < nb; ++j) {
    const double sb = grid.sin_beta()(j);
    // Keep the modes whose difference symbol 2 sin(m d_xi / 2) / (sin(beta) d_xi)
    // stays below 2 / d_beta.
    const double ratio = sb * grid.d_xi() / grid.d_beta();
    const int m = ratio >= 1.0 ? nyquist
                               : std::max(1, static_cast<int>(std::floor(
                                                 2 * std::asin(ratio) / grid.d_xi() + 1e-9)));
    if (m >= nyquist) {
      min_spacing_ = std::min(min_spacing_, sb * grid.d_xi());
    } else {
      max_mode_[j] = m;
      min_spacing_ =
          std::min(min_spacing_, sb * grid.d_xi() / std::sin(0.5 * m * grid.d_xi()));
      const Eigen::MatrixXd E = basis_.leftCols(2 * m + 1);
      projection_[j] = E * E.transpose();
    }
    for (int k = 0; k <= std::min(max_mode_[j], nyquist); ++k)
      if (!found[k]) {
        found[k] = true;
        source_row_[k] = j;
      }
  }
}

void PolarFilter::apply(ScalarField& field) const
{
  for (int j = 0; j < static_cast<int>(projection_.size()); ++j) {
    if (projection_[j].size() == 0) continue;
    const Eigen::VectorXd row = field.row(j).transpose().matrix();
    field.row(j) = (projection_[j] * row).transpose().array();
  }
}

void PolarFilter::regularize(ScalarField& field) const
{
  if (n_xi_ == 1) return;
  const int nyquist = n_xi_ / 2;
  std::vector<int> rows;
  for (int j = 0; j < static_cast<int>(projection_.size()); ++j)
    if (projection_[j].size() != 0) rows.push_back(j);
  if (rows.empty()) return;

  // Coefficients of every row that serves as a source, read before any write.
  const int last_source = source_row_[nyquist];
  const Eigen::MatrixXd coeffs =
      basis_.transpose() * field.topRows(last_source + 1).transpose().matrix();
  for (int j : rows) {
    Eigen::VectorXd c = coeffs.col(j);
    for (int m = max_mode_[j] + 1; m <= nyquist; ++m) {
      const int src = source_row_[m];
      const double scale = std::pow(sin_beta_(j) / sin_beta_(src), m);
      c(2 * m - 1) = scale * coeffs(2 * m - 1, src);
      if (2 * m < n_xi_) c(2 * m) = scale * coeffs(2 * m, src);
    }
    field.row(j) = (basis_ * c).transpose().array();
  }
}

} // namespace capflow
