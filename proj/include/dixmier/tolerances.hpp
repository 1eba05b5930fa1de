#pragma once

namespace dixmier {

// One record threaded through every operation. Certificates store the
// values that were in force so that verification uses the same thresholds.
struct Tolerances {
  double hermitian_tol = 1e-10;  // relative to max(1, max |a_ij|)
  double rank_tol = 1e-10;       // relative to the largest singular value
  double proj_tol = 1e-10;
  double sqrt_tol = 1e-10;
  double psd_tol = 1e-10;  // relative to max(1, ||A||_op)
  double trace_tol = 1e-10;
  double pairing_tol = 1e-8;
  double commutator_tol = 1e-9;
  double general_commutator_tol = 1e-7;  // inputs routed through the numerical pinch
  double jacobi_tol = 1e-15;             // off-diagonal stopping ratio for the eigensolver
  int jacobi_max_sweeps = 100;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances defaults{};
  return defaults;
}

}  // namespace dixmier
