#include "capflow/quermass.hpp"
#include "capflow/scenarios.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace capflow;
using capflow::test::observed_order;

namespace {

QuermassVector quermass_of(const RadialField& st) { return quermass_all(geometry_from_phi(st)); }

} // namespace

TEST_SUITE("quermass")
{
  TEST_CASE("cap constants in closed form")
  {
    for (double theta : {M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2, 2.0}) {
      const CapConstants c = cap_constants(theta, 2);
      const double ct = std::cos(theta);
      CHECK(std::abs(c.b_theta - M_PI / 3 * (2 - 3 * ct + ct * ct * ct)) < 1e-12);
      CHECK(std::abs(c.omega_theta - 3 * c.b_theta) < 1e-12);
      CHECK(std::abs(c.cap_area - 2 * M_PI * (1 - ct)) < 1e-12);
      CHECK(c.omega_n == doctest::Approx(4 * M_PI).epsilon(1e-15));
    }
    CHECK(cap_constants(M_PI / 3).b_theta == doctest::Approx(5 * M_PI / 24).epsilon(1e-14));
  }

  TEST_CASE("half unit ball and the omega relation in every dimension")
  {
    for (int n = 1; n <= 6; ++n) {
      const CapConstants half = cap_constants(M_PI / 2, n);
      CHECK(half.b_theta == doctest::Approx(half.omega_n / (2 * (n + 1))).epsilon(1e-13));
      for (double theta : {0.3, 1.1, 2.5}) {
        const CapConstants c = cap_constants(theta, n);
        CHECK(c.omega_theta == doctest::Approx((n + 1) * c.b_theta).epsilon(1e-12));
      }
    }
    CHECK(sphere_area(1) == doctest::Approx(2 * M_PI));
    CHECK(sphere_area(2) == doctest::Approx(4 * M_PI));
    CHECK(sphere_area(3) == doctest::Approx(2 * M_PI * M_PI));
  }

  TEST_CASE("cap constants reject angles outside (0, pi)")
  {
    CHECK_THROWS_AS((void)cap_constants(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)cap_constants(M_PI), std::invalid_argument);
  }

  TEST_CASE("unit hemisphere: V_0 = V_1 = V_2 = 2 pi / 3")
  {
    const QuermassVector q = quermass_of(cap_phi({1.0, M_PI / 2}, HalfSphereGrid(32, 16)));
    for (int k = 0; k <= 2; ++k) CHECK(q.V[k] == doctest::Approx(2 * M_PI / 3).epsilon(1e-12));
  }

  TEST_CASE("cap quermassintegrals scale like r^(n+1-k) b_theta")
  {
    for (double theta : {M_PI / 6, M_PI / 3}) {
      const double b = cap_constants(theta).b_theta;
      std::vector<double> h;
      std::vector<std::vector<double>> err(3);
      for (int nb : {32, 64, 128}) {
        const HalfSphereGrid g = HalfSphereGrid::axisymmetric(nb);
        const QuermassVector q = quermass_of(cap_phi({1.0, theta}, g));
        h.push_back(g.d_beta());
        for (int k = 0; k <= 2; ++k) err[k].push_back(std::abs(q.V[k] / b - 1));
      }
      for (int k = 0; k <= 2; ++k) {
        INFO("theta " << theta << " k " << k);
        CHECK(err[k].back() < 1e-3);
        // the volume is superconvergent on caps
        CHECK(observed_order(h, err[k]) >= 1.8);
      }
    }
  }

  TEST_CASE("exact scaling of the integrator")
  {
    const HalfSphereGrid g(32, 64);
    const RadialField one = perturbed_cap({1.0, M_PI / 3}, {}, g);
    const double lambda = 1.7;
    const RadialField scaled{g, one.phi + std::log(lambda), one.ghost + std::log(lambda),
                             one.theta};
    const QuermassVector a = quermass_of(one), b = quermass_of(scaled);
    for (int k = 0; k <= 3; ++k)
      CHECK(std::abs(b.V[k] / a.V[k] - std::pow(lambda, 3 - k)) < 1e-10);
  }

  TEST_CASE("reassembly from raw integrals is exact")
  {
    const QuermassVector q = quermass_of(perturbed_cap({1.0, M_PI / 4}, {}, HalfSphereGrid(32, 64)));
    const std::vector<double> V = assemble_quermass(q.raw, q.theta, q.n);
    for (int k = 0; k <= 3; ++k) CHECK(V[k] == q.V[k]);
    CHECK(q.V[0] > 0);
    CHECK(q.V[1] > 0);
    const double c = std::cos(q.theta);
    CHECK(std::abs(q.V[1] - (q.raw.area - c * q.raw.wetted_area) / 3) < 1e-15);
  }

  TEST_CASE("divergence-theorem volume against Monte Carlo")
  {
    const HalfSphereGrid g(32, 64);
    PerturbationSpec p;
    p.amplitude = 0.05;
    p.mixture_modes = 2;
    p.seed = 9;
    const GeometricState s = geometry_from_phi(perturbed_cap({1.0, M_PI / 3}, p, g));
    const VolumeEstimate mc = mc_volume(s, 400000, 17);
    const double v0 = quermass_all(s).V[0];
    CHECK(std::abs(mc.estimate - v0) < 3 * mc.standard_error);
  }

  TEST_CASE("minkowski formulas on the hemisphere and on caps")
  {
    const GeometricState hemi = geometry_from_phi(cap_phi({1.0, M_PI / 2}, HalfSphereGrid(32, 16)));
    CHECK(std::abs(minkowski_residual(hemi, 1)) < 1e-12);
    CHECK(std::abs(minkowski_residual(hemi, 2)) < 1e-12);
    CHECK_THROWS_AS((void)minkowski_residual(hemi, 0), std::out_of_range);
    CHECK_THROWS_AS((void)minkowski_residual(hemi, 3), std::out_of_range);

    for (double theta : {M_PI / 6, M_PI / 3}) {
      std::vector<double> h, e1, e2;
      for (int nb : {32, 64, 128}) {
        const HalfSphereGrid g = HalfSphereGrid::axisymmetric(nb);
        const GeometricState s = geometry_from_phi(cap_phi({1.0, theta}, g));
        h.push_back(g.d_beta());
        e1.push_back(std::abs(minkowski_residual(s, 1)));
        e2.push_back(std::abs(minkowski_residual(s, 2)));
      }
      CHECK(e1.back() < 1e-3);
      CHECK(e2.back() < 1e-3);
      CHECK(observed_order(h, e1) == doctest::Approx(2.0).epsilon(0.2));
      CHECK(observed_order(h, e2) == doctest::Approx(2.0).epsilon(0.2));
    }
  }

  TEST_CASE("minkowski formulas on a non-axisymmetric perturbed cap")
  {
    PerturbationSpec p;
    p.amplitude = 0.05;
    std::vector<double> h, e1, e2;
    for (int nb : {32, 64}) {
      const HalfSphereGrid g(nb, 2 * nb);
      const GeometricState s = geometry_from_phi(perturbed_cap({1.0, M_PI / 3}, p, g));
      h.push_back(g.d_beta());
      e1.push_back(std::abs(minkowski_residual(s, 1)));
      e2.push_back(std::abs(minkowski_residual(s, 2)));
    }
    CHECK(e1.back() < 1e-3);
    CHECK(e2.back() < 1e-3);
    CHECK(observed_order(h, e1) == doctest::Approx(2.0).epsilon(0.25));
    CHECK(observed_order(h, e2) == doctest::Approx(2.0).epsilon(0.25));
  }

  TEST_CASE("Gauss-Bonnet identity")
  {
    const GeometricState hemi = geometry_from_phi(cap_phi({1.0, M_PI / 2}, HalfSphereGrid(32, 16)));
    CHECK(std::abs(gauss_bonnet_check(hemi)) < 1e-12);

    std::vector<double> h, e;
    for (int nb : {32, 64, 128}) {
      const HalfSphereGrid g = HalfSphereGrid::axisymmetric(nb);
      h.push_back(g.d_beta());
      e.push_back(std::abs(gauss_bonnet_check(geometry_from_phi(cap_phi({2.0, M_PI / 3}, g)))));
    }
    CHECK(e.back() < 1e-3);
    CHECK(observed_order(h, e) == doctest::Approx(2.0).epsilon(0.2));

    PerturbationSpec p;
    p.amplitude = 0.05;
    for (int nb : {32, 64}) {
      const GeometricState s = geometry_from_phi(perturbed_cap({1.0, M_PI / 3}, p, HalfSphereGrid(nb, 2 * nb)));
      CHECK(std::abs(gauss_bonnet_check(s)) / cap_constants(M_PI / 3).cap_area < 5e-3);
    }
  }
}
