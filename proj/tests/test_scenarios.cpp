#include "capflow/quermass.hpp"
#include "capflow/scenarios.hpp"

#include <doctest.h>

using namespace capflow;

TEST_SUITE("scenarios")
{
  TEST_CASE("cap radius and the closed-form phi")
  {
    for (double theta : {M_PI / 6, M_PI / 3, M_PI / 2, 2.2}) {
      const CapSpec cap{1.5, theta};
      CHECK(cap_radius(cap, M_PI / 2) == doctest::Approx(1.5 * std::sin(theta)).epsilon(1e-14));
      CHECK(cap_radius(cap, 0.0) == doctest::Approx(1.5 * (1 - std::cos(theta))).epsilon(1e-14));
      // the point lies on the sphere of radius r around r cos(theta) e
      for (double beta : {0.2, 0.9, 1.4}) {
        const double rho = cap_radius(cap, beta);
        const double x = rho * std::sin(beta), z = rho * std::cos(beta) + 1.5 * std::cos(theta);
        CHECK(std::hypot(x, z) == doctest::Approx(1.5).epsilon(1e-13));
      }
    }
    const HalfSphereGrid g(16, 8);
    const RadialField hemi = cap_phi({2.0, M_PI / 2}, g);
    CHECK((hemi.phi - std::log(2.0)).abs().maxCoeff() < 1e-15);
    CHECK((hemi.ghost - std::log(2.0)).abs().maxCoeff() < 1e-15);
  }

  TEST_CASE("fitted cap radius recovers the cap")
  {
    const CapSpec cap{0.8, M_PI / 4};
    for (double beta : {0.1, 0.7, 1.5}) {
      const double rho = cap_radius(cap, beta);
      CHECK(fitted_cap_radius(cap.theta, rho, rho * std::cos(beta)) ==
            doctest::Approx(0.8).epsilon(1e-12));
    }
  }

  TEST_CASE("perturbation profile is normalized and flat at the equator")
  {
    for (int p : {2, 3, 4}) {
      double peak = 0;
      for (int i = 0; i <= 2000; ++i) peak = std::max(peak, perturbation_profile(p, i * M_PI / 4000));
      CHECK(peak == doctest::Approx(1.0).epsilon(1e-5));
      CHECK(std::abs(perturbation_profile(p, M_PI / 2)) < 1e-15);
      const double h = 1e-4;
      CHECK(std::abs(perturbation_profile(p, M_PI / 2 - h)) < 10 * h * h);
    }
  }

  TEST_CASE("zero amplitude is the cap")
  {
    const HalfSphereGrid g(32, 64);
    PerturbationSpec p;
    p.amplitude = 0.0;
    const RadialField a = perturbed_cap({1.0, M_PI / 3}, p, g);
    const RadialField b = cap_phi({1.0, M_PI / 3}, g);
    CHECK((a.phi - b.phi).abs().maxCoeff() == 0.0);
    CHECK((a.ghost - b.ghost).abs().maxCoeff() == 0.0);
  }

  TEST_CASE("perturbation keeps the boundary condition and convexity")
  {
    const HalfSphereGrid g(32, 64);
    const RadialField cap = cap_phi({1.0, M_PI / 3}, g);
    const double cap_bc = boundary_condition_residual(cap).abs().maxCoeff();
    for (int m : {2, 3, 4}) {
      PerturbationSpec p;
      p.amplitude = 0.015;
      p.xi_mode = m;
      p.beta_profile = m;
      double used = -1;
      const RadialField st = perturbed_cap({1.0, M_PI / 3}, p, g, &used);
      CHECK(used == 0.015);
      CHECK((st.phi - cap.phi).abs().maxCoeff() > 1e-3);
      CHECK(std::abs(boundary_condition_residual(st).abs().maxCoeff() - cap_bc) < 1e-12);
      CHECK(geometry_from_phi(st).is_convex());
    }
  }

  TEST_CASE("mixtures are seeded")
  {
    const HalfSphereGrid g(32, 64);
    PerturbationSpec p;
    p.amplitude = 0.02;
    p.mixture_modes = 2;
    p.seed = 3;
    const RadialField a = perturbed_cap({1.0, M_PI / 4}, p, g);
    const RadialField b = perturbed_cap({1.0, M_PI / 4}, p, g);
    CHECK((a.phi - b.phi).abs().maxCoeff() == 0.0);
    p.seed = 4;
    const RadialField c = perturbed_cap({1.0, M_PI / 4}, p, g);
    CHECK((a.phi - c.phi).abs().maxCoeff() > 0.0);
  }

  TEST_CASE("too large amplitudes are halved until convex")
  {
    const HalfSphereGrid g(32, 64);
    PerturbationSpec p;
    p.amplitude = 0.5;
    double used = 0;
    const RadialField st = perturbed_cap({1.0, M_PI / 6}, p, g, &used);
    CHECK(used < 0.5);
    CHECK(geometry_from_phi(st).is_convex());
    double k = 0.5;
    while (k > used) k /= 2;
    CHECK(k == used);
  }

  TEST_CASE("invalid perturbations are rejected")
  {
    const HalfSphereGrid g(16, 16);
    PerturbationSpec p;
    p.xi_mode = -1;
    CHECK_THROWS_AS((void)perturbed_cap({1.0, M_PI / 3}, p, g), std::invalid_argument);
    p = {};
    p.beta_profile = 1;
    CHECK_THROWS_AS((void)perturbed_cap({1.0, M_PI / 3}, p, g), std::invalid_argument);
    p = {};
    p.xi_mode = 10;
    p.beta_profile = 10;
    CHECK_THROWS_AS((void)perturbed_cap({1.0, M_PI / 3}, p, g), std::invalid_argument);
    CHECK_THROWS_AS((void)cap_phi({0.0, M_PI / 3}, g), std::invalid_argument);
  }

  TEST_CASE("monte carlo volume of caps")
  {
    const GeometricState hemi = geometry_from_phi(cap_phi({1.0, M_PI / 2}, HalfSphereGrid(32, 64)));
    const VolumeEstimate v = mc_volume(hemi, 200000, 5);
    CHECK(std::abs(v.estimate - 2 * M_PI / 3) < 3 * v.standard_error);
    CHECK(v.standard_error > 0);

    const GeometricState cap = geometry_from_phi(cap_phi({1.0, M_PI / 3}, HalfSphereGrid(32, 64)));
    const VolumeEstimate w = mc_volume(cap, 200000, 6);
    CHECK(std::abs(w.estimate - cap_constants(M_PI / 3).b_theta) < 3 * w.standard_error);
  }

  TEST_CASE("monte carlo is deterministic per seed")
  {
    const GeometricState cap = geometry_from_phi(cap_phi({1.0, M_PI / 4}, HalfSphereGrid(16, 32)));
    CHECK(mc_volume(cap, 10000, 8).estimate == mc_volume(cap, 10000, 8).estimate);
    CHECK(mc_volume(cap, 10000, 8).estimate != mc_volume(cap, 10000, 9).estimate);
    CHECK_THROWS_AS((void)mc_volume(cap, 0, 1), std::invalid_argument);
  }
}
