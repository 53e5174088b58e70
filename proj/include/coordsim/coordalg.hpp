#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coordsim/digraph.hpp"

namespace coordsim {

/// Orthonormal basis of the complement of 1_n, stored as (n-1) x n rows.
///
/// Satisfies Q 1 = 0, Q Q^T = I and Q^T Q = I - 1 1^T / n. Rows follow the
/// Helmert construction: row k has k entries 1/sqrt(k(k+1)) followed by one
/// entry -k/sqrt(k(k+1)).
class ProjectionMatrix {
 public:
  explicit ProjectionMatrix(int n);

  int order() const { return static_cast<int>(q_.cols()); }
  const Eigen::MatrixXd& matrix() const { return q_; }

 private:
  Eigen::MatrixXd q_;
};

ProjectionMatrix build_projection(int n);

/// Q L Q^T.
Eigen::MatrixXd reduced_laplacian(const ProjectionMatrix& q, const Eigen::MatrixXd& l);

// Dense eigen helpers shared by the analysis code.
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& m);
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);  // ascending
double spectral_norm(const Eigen::MatrixXd& m);

/// Pairs two eigenvalue multisets by greedy nearest match. Only reliable for
/// non-defective eigenvalues; see characteristic_polynomial for the robust route.
bool spectra_match(const Eigen::VectorXcd& lhs, const Eigen::VectorXcd& rhs, double tol);

/// Coefficients c_0..c_n of det(lambda I - A) = sum_k c_k lambda^(n-k), c_0 = 1
/// (Faddeev-LeVerrier).
Eigen::VectorXd characteristic_polynomial(const Eigen::MatrixXd& a);

struct Lemma1Report {
  bool spectra_match = false;
  bool hurwitz = false;
  /// hurwitz == contains_spanning_tree(source), when a source digraph is given.
  std::optional<bool> consistent_with_spanning_tree;
};

/// Checks that spec(QLQ^T) = spec(L) minus one zero, and whether -QLQ^T is Hurwitz.
/// The multisets are compared through det(lambda I - L) = lambda det(lambda I - QLQ^T),
/// coefficient-wise to 1e-8 relative, which stays well-conditioned when L has
/// defective eigenvalues.
Lemma1Report spectrum_check_lemma1(const Eigen::MatrixXd& l, const ProjectionMatrix& q,
                                   const Digraph* source = nullptr);

/// Solves (-L)^T P + P (-L) = -m I for symmetric positive definite P.
/// Throws SynthesisError when -L is not Hurwitz, NumericError on a bad residual.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& lbar_union, int m);

double lyapunov_residual(const Eigen::MatrixXd& lbar_union, int m, const Eigen::MatrixXd& p);

/// Synthesized objects that make the topology switching law executable.
struct SwitchingCertificate {
  int n = 0;  // vehicles
  int m = 0;  // topologies
  ProjectionMatrix q{2};
  std::vector<Digraph> family;
  std::vector<Eigen::MatrixXd> laplacians;   // L_i
  std::vector<Eigen::MatrixXd> lbar_list;    // Q L_i Q^T
  Eigen::MatrixXd lbar_union;                // sum of lbar_list
  Eigen::MatrixXd p;
  std::vector<Eigen::MatrixXd> h_list;       // (-Lbar_i)^T P + P (-Lbar_i)
  std::vector<double> mu_list;
  double lambda_max_p = 0.0;
  double lambda_min_p = 0.0;
  double eta = 0.0;     // dwell-time lower bound [s]
  double k_phi = 0.0;   // sqrt(lambda_max(P) / lambda_min(P))
  double big_m = 0.0;   // max_i ||L_i||_2
  double mu_min = 0.0;
};

SwitchingCertificate build_certificate(std::span<const Digraph> family,
                                       std::span<const double> mu_list, double a, double b);

/// One topology's contribution to the dwell-time bound.
struct DwellTerm {
  double margin = 0.0;      // 1 - mu_i lambda_max(P)
  double nu = 0.0;          // ||Lbar_i^T (H_i + I) + (H_i + I) Lbar_i||_2
  double lbar_norm = 0.0;   // ||Lbar_i||_2
};

/// sup over theta in (1, 1e4] of min_i min(margin_i / (r theta^2 nu_i), ln theta / (r ||Lbar_i||)),
/// r = a/b. Terms with a zero denominator are non-binding. Log grid of 2000
/// points, then golden-section refinement around the best grid point.
double dwell_time_from_terms(std::span<const DwellTerm> terms, double a_over_b);

std::vector<DwellTerm> dwell_terms(const SwitchingCertificate& cert);

double dwell_time_bound(const SwitchingCertificate& cert, double a, double b);

struct GainInequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct GainReport {
  std::vector<GainInequality> inequalities;
  bool pass = false;
};

/// Checks a > 0, b >= sqrt((M + 4 M^2 k^2 / mu + mu / (4 k^2)) a) and b >= a M.
GainReport validate_gains(double a, double b, const SwitchingCertificate& cert);

/// Guaranteed coordination convergence rate floor (a / 6b) (mu / k_phi^2).
double convergence_rate_bound(double a, double b, const SwitchingCertificate& cert);

}  // namespace coordsim
