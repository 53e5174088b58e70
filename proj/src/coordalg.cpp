#include "coordsim/coordalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <fmt/format.h>

#include "coordsim/errors.hpp"

namespace coordsim {

namespace {

constexpr double kHurwitzMargin = 1e-10;
constexpr double kLyapunovTol = 1e-10;

Eigen::MatrixXd as_real(const Eigen::MatrixXi& m) { return m.cast<double>(); }

}  // namespace

ProjectionMatrix::ProjectionMatrix(int n) {
  if (n < 2) throw ArgumentError(fmt::format("projection needs n >= 2, got {}", n));
  q_ = Eigen::MatrixXd::Zero(n - 1, n);
  for (int k = 1; k < n; ++k) {
    const double c = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    q_.row(k - 1).head(k).setConstant(c);
    q_(k - 1, k) = -k * c;
  }
}

ProjectionMatrix build_projection(int n) { return ProjectionMatrix(n); }

Eigen::MatrixXd reduced_laplacian(const ProjectionMatrix& q, const Eigen::MatrixXd& l) {
  const auto n = q.matrix().cols();
  if (l.rows() != n || l.cols() != n) {
    throw DimensionError(
        fmt::format("Laplacian is {}x{}, projection expects {}x{}", l.rows(), l.cols(), n, n));
  }
  return q.matrix() * l * q.matrix().transpose();
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");
  return solver.eigenvalues();
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return {};
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");
  return solver.eigenvalues();
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::VectorXd ev = symmetric_eigenvalues(m.transpose() * m);
  return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

bool spectra_match(const Eigen::VectorXcd& lhs, const Eigen::VectorXcd& rhs, double tol) {
  if (lhs.size() != rhs.size()) return false;
  std::vector<bool> used(rhs.size(), false);
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    Eigen::Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < rhs.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(lhs(i) - rhs(j));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < 0 || best_dist > tol) return false;
    used[best] = true;
  }
  return true;
}

Eigen::VectorXd characteristic_polynomial(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (a.cols() != n) throw DimensionError("characteristic polynomial needs a square matrix");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c(0) = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c(k - 1) * eye;
    c(k) = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

Lemma1Report spectrum_check_lemma1(const Eigen::MatrixXd& l, const ProjectionMatrix& q,
                                   const Digraph* source) {
  const Eigen::VectorXd row_sums = l.rowwise().sum();
  if (row_sums.size() > 0 && row_sums.cwiseAbs().maxCoeff() > 1e-9) {
    throw ArgumentError("matrix is not a Laplacian: row sums are not zero");
  }
  const Eigen::MatrixXd lbar = reduced_laplacian(q, l);
  const Eigen::VectorXcd reduced = eigenvalues(lbar);

  // lambda * chi_reduced has the same coefficients as chi_full shifted by one
  const Eigen::VectorXd chi_full = characteristic_polynomial(l);
  const Eigen::VectorXd chi_reduced = characteristic_polynomial(lbar);
  Lemma1Report report;
  report.spectra_match = true;
  for (Eigen::Index k = 0; k < chi_full.size(); ++k) {
    const double expected = k < chi_reduced.size() ? chi_reduced(k) : 0.0;
    if (std::abs(chi_full(k) - expected) > 1e-8 * std::max(1.0, std::abs(chi_full(k)))) {
      report.spectra_match = false;
    }
  }
  double max_real = -std::numeric_limits<double>::infinity();
  for (const auto& ev : reduced) max_real = std::max(max_real, -ev.real());
  report.hurwitz = max_real < -kHurwitzMargin;
  if (source != nullptr) {
    report.consistent_with_spanning_tree = report.hurwitz == contains_spanning_tree(*source);
  }
  return report;
}

double lyapunov_residual(const Eigen::MatrixXd& lbar_union, int m, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd a = -lbar_union;
  const auto k = lbar_union.rows();
  return (a.transpose() * p + p * a + m * Eigen::MatrixXd::Identity(k, k)).norm();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& lbar_union, int m) {
  if (lbar_union.rows() != lbar_union.cols()) throw DimensionError("L_union must be square");
  if (m < 1) throw ArgumentError("topology count must be >= 1");
  const auto k = lbar_union.rows();
  const Eigen::MatrixXd a = -lbar_union;

  const Eigen::VectorXcd ev = eigenvalues(a);
  for (const auto& e : ev) {
    if (e.real() >= -kHurwitzMargin) {
      throw SynthesisError("family not jointly connected: -L_union is not Hurwitz");
    }
  }

  // (I kron A^T + A^T kron I) vec(P) = vec(-m I), column-major vec
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd at = a.transpose();
  Eigen::MatrixXd kron(k * k, k * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      kron.block(i * k, j * k, k, k) = eye(i, j) * at + at(i, j) * eye;
    }
  }
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(
      Eigen::MatrixXd(-m * eye).data(), k * k);
  const Eigen::VectorXd sol = kron.fullPivLu().solve(rhs);
  Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(sol.data(), k, k);
  p = 0.5 * (p + p.transpose());

  const double residual = lyapunov_residual(lbar_union, m, p);
  if (!(residual <= kLyapunovTol)) {
    throw NumericError(fmt::format("Lyapunov solve residual {:.3e} exceeds {:.0e}", residual,
                                   kLyapunovTol));
  }
  if (symmetric_eigenvalues(p)(0) <= 0.0) {
    throw NumericError("Lyapunov solution is not positive definite");
  }
  return p;
}

SwitchingCertificate build_certificate(std::span<const Digraph> family,
                                       std::span<const double> mu_list, double a, double b) {
  if (!(a > 0.0)) throw ArgumentError(fmt::format("gain a must be > 0, got {}", a));
  if (!(b > 0.0)) throw ArgumentError(fmt::format("gain b must be > 0, got {}", b));
  if (family.empty()) throw ArgumentError("topology family is empty");
  if (mu_list.size() != family.size()) {
    throw DimensionError(fmt::format("{} mu values for {} topologies", mu_list.size(),
                                     family.size()));
  }

  const DigraphUnion u = union_digraphs(family);  // checks orders agree
  if (!contains_spanning_tree(u.digraph)) {
    throw SynthesisError(
        "family not jointly connected: union of topologies has no directed spanning tree");
  }

  SwitchingCertificate cert;
  cert.n = family.front().size();
  cert.m = static_cast<int>(family.size());
  cert.q = build_projection(cert.n);
  cert.family.assign(family.begin(), family.end());
  cert.lbar_union = Eigen::MatrixXd::Zero(cert.n - 1, cert.n - 1);
  for (const auto& d : family) {
    cert.laplacians.push_back(as_real(laplacian(d)));
    cert.lbar_list.push_back(reduced_laplacian(cert.q, cert.laplacians.back()));
    cert.lbar_union += cert.lbar_list.back();
  }

  cert.p = solve_lyapunov(cert.lbar_union, cert.m);
  const Eigen::VectorXd p_ev = symmetric_eigenvalues(cert.p);
  cert.lambda_min_p = p_ev(0);
  cert.lambda_max_p = p_ev(p_ev.size() - 1);

  const double mu_upper = 1.0 / cert.lambda_max_p;
  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    const double mu = mu_list[i];
    if (!(mu > 0.0 && mu < mu_upper)) {
      throw ArgumentError(fmt::format("mu_{} = {} outside admissible interval (0, {:.10g})",
                                      i + 1, mu, mu_upper));
    }
  }
  cert.mu_list.assign(mu_list.begin(), mu_list.end());
  cert.mu_min = *std::min_element(mu_list.begin(), mu_list.end());

  for (const auto& lbar : cert.lbar_list) {
    Eigen::MatrixXd h = -lbar.transpose() * cert.p - cert.p * lbar;
    cert.h_list.push_back(0.5 * (h + h.transpose()));
  }

  cert.k_phi = std::sqrt(cert.lambda_max_p / cert.lambda_min_p);
  for (const auto& l : cert.laplacians) cert.big_m = std::max(cert.big_m, spectral_norm(l));
  cert.eta = dwell_time_bound(cert, a, b);
  return cert;
}

std::vector<DwellTerm> dwell_terms(const SwitchingCertificate& cert) {
  std::vector<DwellTerm> terms;
  const auto k = cert.p.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
  for (int i = 0; i < cert.m; ++i) {
    const auto& lbar = cert.lbar_list[i];
    const Eigen::MatrixXd hi = cert.h_list[i] + eye;
    DwellTerm t;
    t.margin = 1.0 - cert.mu_list[i] * cert.lambda_max_p;
    t.nu = spectral_norm(lbar.transpose() * hi + hi * lbar);
    t.lbar_norm = spectral_norm(lbar);
    terms.push_back(t);
  }
  return terms;
}

double dwell_time_from_terms(std::span<const DwellTerm> terms, double a_over_b) {
  if (!(a_over_b > 0.0)) throw ArgumentError("a/b must be > 0");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kThetaMax = 1e4;
  constexpr int kGrid = 2000;

  auto objective = [&](double theta) {
    double v = kInf;
    for (const auto& t : terms) {
      if (t.nu > 0.0) v = std::min(v, t.margin / (a_over_b * theta * theta * t.nu));
      if (t.lbar_norm > 0.0) v = std::min(v, std::log(theta) / (a_over_b * t.lbar_norm));
    }
    return v;
  };

  auto grid = [&](int k) { return std::pow(kThetaMax, static_cast<double>(k) / kGrid); };
  int best_k = 1;
  double best = objective(grid(1));
  for (int k = 2; k <= kGrid; ++k) {
    const double v = objective(grid(k));
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  if (std::isinf(best)) return best;

  // The objective is the min of a decreasing and an increasing function of
  // theta, hence unimodal: golden-section on the bracketing grid cell pair.
  double lo = best_k > 1 ? grid(best_k - 1) : 1.0;
  double hi = best_k < kGrid ? grid(best_k + 1) : kThetaMax;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-6 * lo) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = objective(x1);
    }
  }
  return std::max({best, f1, f2});
}

double dwell_time_bound(const SwitchingCertificate& cert, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw ArgumentError("gains must be positive");
  const auto terms = dwell_terms(cert);
  return dwell_time_from_terms(terms, a / b);
}

GainReport validate_gains(double a, double b, const SwitchingCertificate& cert) {
  GainReport report;
  report.inequalities.push_back({"a > 0", a, 0.0, a > 0.0});

  const double k2 = cert.k_phi * cert.k_phi;
  const double mu = cert.mu_min;
  const double m = cert.big_m;
  const double coeff = m + 4.0 * m * m * k2 / mu + mu / (4.0 * k2);
  const double b_min = std::sqrt(std::max(0.0, coeff * a));
  report.inequalities.push_back(
      {"b >= sqrt((M + 4 M^2 k_phi^2 / mu + mu / (4 k_phi^2)) a)", b, b_min, b >= b_min});
  report.inequalities.push_back({"b >= a M", b, a * m, b >= a * m});

  report.pass = std::all_of(report.inequalities.begin(), report.inequalities.end(),
                            [](const GainInequality& g) { return g.pass; });
  return report;
}

double convergence_rate_bound(double a, double b, const SwitchingCertificate& cert) {
  return a / (6.0 * b) * cert.mu_min / (cert.k_phi * cert.k_phi);
}

}  // namespace coordsim
