#pragma once

#include <vector>

#include "soqbt/quadrature.hpp"
#include "soqbt/system.hpp"

namespace soqbt {

/// Transfer-function data on one quadrature rule.
struct SampleSet {
  QuadratureRule rule;
  std::vector<TransferSample> samples;  // aligned with rule nodes
  std::vector<CoefficientEval> coeffs;  // damping scalars at the nodes
  bool has_derivatives = false;
  /// The data come from a model with Cv = 0, so G doubles as Gp and Gv = 0
  /// even when split samples are absent.
  bool zero_velocity_output = false;

  std::size_t size() const { return samples.size(); }

  /// Checks alignment with the rule and the presence of derivatives when
  /// has_derivatives is set.
  void check() const;
};

/// Samples `sys` at every node of `rule`. Split parts are always recorded;
/// derivatives on request. Nodes are evaluated through parallel_for.
SampleSet sample_system(const SecondOrderSystem& sys, const QuadratureRule& rule,
                        bool with_derivatives = false);

enum class AssemblyMode { General, Hermite };

/// Data matrices of the quadrature-based balancing:
///   Mq (pK x mJ), Kq (pK x mJ), Bq (pK x m), Cpq (p x mJ), Cvq (p x mJ).
/// Row block k belongs to left node k, column block j to right node j.
struct LoewnerDataSet {
  CMatrix Mq, Kq, Bq, Cpq, Cvq;
  Eigen::Index m = 0, p = 0;
  bool realified = false;
  double realify_residual = 0.0;  // relative imaginary part removed by realify
  AssemblyMode mode = AssemblyMode::General;

  std::size_t left_count() const { return p == 0 ? 0 : static_cast<std::size_t>(Mq.rows() / p); }
  std::size_t right_count() const { return m == 0 ? 0 : static_cast<std::size_t>(Mq.cols() / m); }
};

/// Data matrices from left samples G(i theta_k) and right samples
/// Gp(i zeta_j), Gv(i zeta_j):
///   Mq_kj = -(w_k rho_j / (d_t d_z)) (d_t G(i theta) - d_z T) / (h_t - h_z)
///   Kq_kj =  (w_k rho_j / (d_t d_z)) (n_t G(i theta) - n_z T) / (h_t - h_z)
/// with T = Gp(i zeta) + (theta / zeta) Gv(i zeta), and
///   Bq_k = w_k G(i theta_k),  Cpq_j = rho_j Gp(i zeta_j),
///   Cvq_j = rho_j / (i zeta_j) Gv(i zeta_j).
///
/// Throws HypothesisViolation listing every violated precondition and
/// MissingSplitSamples when the right set has neither split parts nor the
/// zero_velocity_output flag.
LoewnerDataSet assemble_general(const SampleSet& left, const SampleSet& right,
                                const DampingSpec& damping);

/// Hermite variant for Cv = 0 data. `samples` holds the right rule i s_j; the
/// left rule is its negation with the same weights, so the node set must be
/// closed under negation. Blocks where the left and right nodes coincide use
///   Mq = -eta_k eta_j / d^2 (d' G + d G') / h'
///   Kq =  eta_k eta_j / d^2 (n' G + n G') / h'
/// and all other blocks use the general formula.
///
/// Throws MissingDerivative, HypothesisViolation.
LoewnerDataSet assemble_hermite(const SampleSet& samples, const DampingSpec& damping);

/// Left rule paired with a Hermite sample set.
QuadratureRule hermite_left_rule(const QuadratureRule& right);

/// Blockwise unitary transform that maps conjugate-symmetric data to real
/// data. With J = (1/sqrt 2) [[I, -iI], [I, iI]] per node pair:
///   Mq, Kq <- (I (x) J_p^H) X (I (x) J_m),  Bq <- (I (x) J_p^H) Bq,
///   Cpq, Cvq <- X (I (x) J_m).
///
/// Both rules must be pair ordered. Throws UnsupportedDamping for damping that
/// is not conjugate symmetric and NotConjugateSymmetric when an imaginary
/// residual exceeds 1e-10 relative.
LoewnerDataSet realify(const LoewnerDataSet& ds, const QuadratureRule& left,
                       const QuadratureRule& right, const DampingSpec& damping);

/// Largest relative imaginary part across the five matrices, before stripping.
double max_imaginary_residual(const LoewnerDataSet& ds);

/// Classical second-order Loewner pair recovered from the data matrices by
/// removing the diagonal scalings:
///   Mq = -Dl L Dr,  Kq = Dl Ls Dr,
///   Dl = diag(w_k / d(i theta_k)) (x) I_p,  Dr = diag(rho_j / d(i zeta_j)) (x) I_m.
struct SoLoewnerPair {
  CMatrix L, Ls;
};

/// Needs Rayleigh damping, complex (not realified) data and Cvq = 0.
/// Throws UnsupportedDamping or ZeroWeight.
SoLoewnerPair to_so_loewner(const LoewnerDataSet& ds, const QuadratureRule& left,
                            const QuadratureRule& right, const DampingSpec& damping);

/// Reapplies the scalings; inverse of to_so_loewner for Mq and Kq.
std::pair<CMatrix, CMatrix> from_so_loewner(const SoLoewnerPair& pair, Eigen::Index p,
                                            Eigen::Index m, const QuadratureRule& left,
                                            const QuadratureRule& right,
                                            const DampingSpec& damping);

}  // namespace soqbt
