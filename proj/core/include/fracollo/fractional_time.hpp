#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracollo {

/// Coefficients of (1-z)^alpha (1 + alpha/2 - alpha z/2), indices 0..n_max.
std::vector<double> cq_weights(double alpha, std::size_t n_max);

/// Starting weights w_{n,1..m} making the discrete operator exact on t^gamma_k.
/// `omega` must hold at least n+1 CQ weights for the same alpha.
std::vector<double> starting_weights(double alpha, std::span<const double> gamma, std::size_t n,
                                     std::span<const double> omega);

/// Correction weights of the second-difference operator E_2, exact on t^gamma_r.
std::vector<double> e2_weights(std::span<const double> gamma, std::size_t n);

/// gamma_k = k alpha, k = 1..m.
std::vector<double> default_exponents(double alpha, int m);

/// E_alpha(z) for 0 < alpha <= 1 and real z <= 0.
double mittag_leffler(double alpha, double z);

/// Weight tables for one fractional order on a uniform time grid.
class FractionalScheme {
 public:
  FractionalScheme(double alpha, double tau, std::size_t steps, std::vector<double> gamma,
                   std::vector<double> gamma_u, std::vector<double> gamma_f, double kappa);
  /// m_u = m_f = m with gamma_k = k alpha for all three sets.
  static FractionalScheme standard(double alpha, double tau, std::size_t steps, int m, double kappa);

  double alpha() const { return alpha_; }
  double tau() const { return tau_; }
  double tau_alpha() const { return tau_alpha_; }
  double kappa() const { return kappa_; }
  std::size_t steps() const { return steps_; }
  std::size_t m() const { return gamma_.size(); }
  std::size_t m_u() const { return gamma_u_.size(); }
  std::size_t m_f() const { return gamma_f_.size(); }
  const std::vector<double>& gamma() const { return gamma_; }
  /// Steps 1..startup_steps() need an iterative startup because their
  /// correction terms reference unknown levels.
  std::size_t startup_steps() const;

  const std::vector<double>& omega() const { return omega_; }
  std::span<const double> start(std::size_t n) const { return row(start_, m(), n); }
  std::span<const double> e2_u(std::size_t n) const { return row(e2u_, m_u(), n); }
  std::span<const double> e2_f(std::size_t n) const { return row(e2f_, m_f(), n); }

 private:
  static std::span<const double> row(const std::vector<double>& t, std::size_t w, std::size_t n) {
    return {t.data() + n * w, w};
  }

  double alpha_;
  double tau_;
  double tau_alpha_;
  std::size_t steps_;
  std::vector<double> gamma_, gamma_u_, gamma_f_;
  double kappa_;
  std::vector<double> omega_;
  std::vector<double> start_, e2u_, e2f_;  // row n holds weights for step n
};

/// tau^-alpha [sum_{j<=n} omega_{n-j} (u^j - u^0) + sum_{j<=m} w_{n,j} (u^j - u^0)].
Eigen::VectorXd apply_d_tau(const FractionalScheme& s, std::span<const Eigen::VectorXd> history,
                            std::size_t n);
double apply_d_tau(const FractionalScheme& s, std::span<const double> history, std::size_t n);

/// u^n - 2u^{n-1} + u^{n-2} - sum_j w_{n,j} (u^j - u^0).
double apply_e2(std::span<const double> weights, std::span<const double> history, std::size_t n);

/// One fractional field inside a (possibly coupled) state vector.
struct TimeField {
  const FractionalScheme* scheme = nullptr;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
  /// Maps coefficient-space combinations to residual rows (A or its FVM analog).
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> lift;
  /// Reaction term at the residual points, given the field block at time t.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> reaction;
  /// When set, the reaction is a known source used at t_n directly instead of
  /// through the E_2 extrapolation.
  bool explicit_source = false;
};

/// The startup sweeps stop at startup_tol (relative, max norm), or once the
/// update is below startup_floor and has stopped shrinking for
/// startup_stall_sweeps consecutive sweeps (rounding floor of the LS solve).
struct StepperOptions {
  double startup_tol = 1e-12;
  double startup_floor = 1e-7;
  int startup_stall_sweeps = 3;
  int startup_max_sweeps = 100;
};

/// Solves the stacked least-squares step. rhs concatenates the residual
/// blocks of all fields; prev is the state at step n-1.
using StepSolve =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& rhs, std::size_t n, const Eigen::VectorXd& prev)>;

/// Observer invoked after each accepted step.
using StepObserver = std::function<void(std::size_t n, const Eigen::VectorXd& state)>;

/// Runs the semi-implicit scheme:
///   (omega_0 + kappa tau^a) U^n - nu tau^a Lap U^n
///     = omega_0 U^0 - sum_{j<n} omega_{n-j}(U^j-U^0) - sum_j w_{n,j}(U^j-U^0)
///       + tau^a [2F^{n-1} - F^{n-2} + sum_j w^f_{n,j}(F^j-F^0)]
///       + kappa tau^a [2U^{n-1} - U^{n-2} + sum_j w^u_{n,j}(U^j-U^0)]
/// with an implicit fixed-point startup for the first startup_steps() levels.
/// Returns the full state history c^0..c^{steps}.
std::vector<Eigen::VectorXd> run_fractional_stepper(std::span<const TimeField> fields,
                                                    const Eigen::VectorXd& c0, const StepSolve& solve,
                                                    const StepperOptions& opts = {},
                                                    const StepObserver& observer = {});

struct FivpResult {
  std::vector<double> t;
  std::vector<double> u;
};

/// Scalar problem D^alpha u = nu u + f(u, t), u(0) = u0, on [0, T].
FivpResult solve_fivp(double alpha, double nu, const std::function<double(double, double)>& f,
                      double u0, double kappa, double tau, int m, double T,
                      std::vector<double> gamma = {});

}  // namespace fracollo
