#pragma once

#include "ph3/torus_maps.hpp"

#include <string>
#include <vector>

namespace ph3 {

/// A_ph = [[2,1,0],[1,1,0],[0,0,1]]: hyperbolic block times the identity.
IntegerMatrix3 matrix_ph();
/// A_anosov = [[3,2,1],[2,2,1],[1,1,1]]: three real eigenvalues, one unstable.
IntegerMatrix3 matrix_anosov();
/// Inverse of A_anosov: one contracting and two expanding directions.
IntegerMatrix3 matrix_anosov_inverse();

/// psi(t) = sin(2 pi t) / (2 pi), so sup|psi'| = 1 and epsilon is the
/// maximal shear slope.
TrigProfile unit_slope_sine();

struct CatalogEntry {
  std::string family;       ///< name accepted by builtin_map (optionally with ":eps")
  std::string description;
  double default_epsilon;   ///< 0 for families without a parameter
  bool parametric;
};

const std::vector<CatalogEntry>& catalog();

/// Builds "family" or "family:eps", e.g. "da_ph:0.2".
TorusMapSpec builtin_map(const std::string& name);

/// DA family: A o g_2 o g_1 with g_1: x_2 += eps psi(x_1), g_2: x_1 += eps psi(x_3).
TorusMapSpec da_family(const IntegerMatrix3& a, double eps, const std::string& name);
/// Skew family over A_ph: shears among x_1, x_2 only, x_3 untouched.
TorusMapSpec skew_family(double eps);
/// Phi o A o Phi^{-1}, Phi = two fixed shears of amplitude eps.
TorusMapSpec conjugate_family(const IntegerMatrix3& a, double eps, const std::string& name);

/// Conjugates f by the flip that negates coordinate k of every shear target:
/// R f R with R = diag(+-1). Used to build the mirror of an epsilon sweep.
TorusMapSpec flip_conjugate(const TorusMapSpec& spec, int coordinate);

}  // namespace ph3
