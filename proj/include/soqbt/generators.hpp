#pragma once

#include <cstdint>

#include "soqbt/system.hpp"

namespace soqbt {

/// Physical parameters of the three-row mass-spring-damper network. The
/// defaults are a reproducible stand-in for the classical benchmark values.
struct MsdParams {
  double row_mass = 1.0;
  double coupling_mass = 1.0;
  double row_stiffness = 2.0;
  double coupling_stiffness = 1.0;
  double anchor_stiffness = 1.0;
  double alpha = 0.002;
  double beta = 0.002;
};

/// Three rows of `d` masses. The first mass of every row is tied to a
/// coupling mass m0, which is anchored to ground; n = 3d + 1 with m0 at index
/// 0. Input is the all-ones vector, outputs are velocities summed by an
/// all-ones row (Cp = 0).
SecondOrderSystem generate_msd_chain(int d, const MsdParams& params = {});

/// Seeded system with M, K = X^T X + n I and Rayleigh damping with positive
/// coefficients. With `symmetric`, Bu = Cp^T and Cv = 0 (requires m = p).
SecondOrderSystem generate_random_spd_system(int n, int m, int p, std::uint64_t seed,
                                             bool symmetric = false);

/// M = I, K = tridiag(-1, 2, -1), structural damping eta, Bu = e_1, Cp = e_1^T,
/// Cv = 0.
SecondOrderSystem generate_structural_chain(int n, double eta);

}  // namespace soqbt
