#pragma once

#include "capflow/surface.hpp"

#include <vector>

namespace capflow {

/// Constants of the unit cap domain with contact angle theta in R^{n+1}.
struct CapConstants {
  int n = 2;
  double theta = 0.0;
  double b_theta = 0.0;     // volume of the unit cap domain
  double omega_theta = 0.0; // |S^n_theta| - cos(theta) |flat face|
  double omega_n = 0.0;     // |S^n|
  double cap_area = 0.0;    // |S^n_theta|
};

/// Area of the unit sphere S^m.
[[nodiscard]] double sphere_area(int m);

[[nodiscard]] CapConstants cap_constants(double theta, int n = 2);

/// Raw integrals the quermassintegrals are assembled from.
struct QuermassRaw {
  double area = 0.0;             // |Sigma|
  double wetted_area = 0.0;      // flat face enclosed by the boundary curve
  double boundary_length = 0.0;  // |d Sigma|
  double volume = 0.0;           // enclosed volume
  std::vector<double> int_H;     // int_Sigma H_k dA, k = 0..n
  std::vector<double> int_H_bdry; // int_{d Sigma} H^{d Sigma}_{k-1} ds, k = 1..n (index k-1)
};

struct QuermassVector {
  int n = 2;
  double theta = 0.0;
  std::vector<double> V; // V_0 .. V_{n+1}
  QuermassRaw raw;
};

/// Reassemble V_0..V_{n+1} from the raw integrals.
[[nodiscard]] std::vector<double> assemble_quermass(const QuermassRaw& raw, double theta, int n);

[[nodiscard]] QuermassVector quermass_all(const GeometricState& state);

/// (LHS - RHS) / |RHS| of int H_{k-1} (1 + cos(theta) <nu,e>) dA = int H_k <x,nu> dA.
[[nodiscard]] double minkowski_residual(const GeometricState& state, int k);

/// int_Sigma H_n dA - |S^n_theta|.
[[nodiscard]] double gauss_bonnet_check(const GeometricState& state);

} // namespace capflow
