#include "fracollo/fractional_time.hpp"

#include "fracollo/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fracollo {

namespace {

// Neumaier-compensated accumulator in extended precision.
class Accumulator {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) comp_ += (sum_ - t) + v;
    else comp_ += (v - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// Solves the m x m system V w = rhs with V(k, j) = (j+1)^gamma_k.
std::vector<double> solve_power_system(std::span<const double> gamma, std::vector<long double> rhs) {
  const std::size_t m = gamma.size();
  std::vector<long double> V(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      V[k * m + j] = std::pow(static_cast<long double>(j + 1), static_cast<long double>(gamma[k]));
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::fabs(V[r * m + col]) > std::fabs(V[piv * m + col])) piv = r;
    }
    if (std::fabs(V[piv * m + col]) < 1e-300L) throw std::invalid_argument("singular exponent matrix (duplicate gamma?)");
    if (piv != col) {
      for (std::size_t j = 0; j < m; ++j) std::swap(V[piv * m + j], V[col * m + j]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const long double f = V[r * m + col] / V[col * m + col];
      for (std::size_t j = col; j < m; ++j) V[r * m + j] -= f * V[col * m + j];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> w(m);
  for (std::size_t ii = m; ii-- > 0;) {
    long double s = rhs[ii];
    for (std::size_t j = ii + 1; j < m; ++j) s -= V[ii * m + j] * static_cast<long double>(w[j]);
    w[ii] = static_cast<double>(s / V[ii * m + ii]);
  }
  return w;
}

void check_exponents(std::span<const double> gamma) {
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (!(gamma[k] > 0.0)) throw std::invalid_argument("correction exponents must be positive");
    for (std::size_t l = 0; l < k; ++l) {
      if (gamma[l] == gamma[k]) throw std::invalid_argument("correction exponents must be distinct");
    }
  }
}

}  // namespace

std::vector<double> cq_weights(double alpha, std::size_t n_max) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("fractional order must lie in (0, 1]");
  std::vector<double> w(n_max + 1);
  long double b_prev = 0.0L;
  long double b = 1.0L;
  const long double a = alpha;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      const long double bn = b * (static_cast<long double>(n) - 1.0L - a) / static_cast<long double>(n);
      b_prev = b;
      b = bn;
    }
    w[n] = static_cast<double>((1.0L + a / 2.0L) * b - (a / 2.0L) * b_prev);
  }
  return w;
}

std::vector<double> starting_weights(double alpha, std::span<const double> gamma, std::size_t n,
                                     std::span<const double> omega) {
  check_exponents(gamma);
  if (gamma.empty()) return {};
  if (omega.size() < n + 1) throw std::invalid_argument("starting_weights: too few CQ weights");
  std::vector<long double> rhs(gamma.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const long double g = gamma[k];
    const long double a = alpha;
    Accumulator acc;
    acc.add(std::exp(std::lgamma(g + 1.0L) - std::lgamma(g + 1.0L - a)) *
            std::pow(static_cast<long double>(n), g - a));
    for (std::size_t j = 1; j <= n; ++j) {
      acc.add(-static_cast<long double>(omega[n - j]) * std::pow(static_cast<long double>(j), g));
    }
    rhs[k] = acc.value();
  }
  return solve_power_system(gamma, std::move(rhs));
}

std::vector<double> e2_weights(std::span<const double> gamma, std::size_t n) {
  check_exponents(gamma);
  if (gamma.empty()) return {};
  if (n < 2) throw std::invalid_argument("e2_weights: n must be at least 2");
  std::vector<long double> rhs(gamma.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const long double g = gamma[k];
    const long double nn = static_cast<long double>(n);
    Accumulator acc;
    acc.add(std::pow(nn, g));
    acc.add(-2.0L * std::pow(nn - 1.0L, g));
    acc.add(n >= 3 ? std::pow(nn - 2.0L, g) : 0.0L);
    rhs[k] = acc.value();
  }
  return solve_power_system(gamma, std::move(rhs));
}

std::vector<double> default_exponents(double alpha, int m) {
  std::vector<double> g;
  for (int k = 1; k <= m; ++k) g.push_back(k * alpha);
  return g;
}

FractionalScheme::FractionalScheme(double alpha, double tau, std::size_t steps, std::vector<double> gamma,
                                   std::vector<double> gamma_u, std::vector<double> gamma_f, double kappa)
    : alpha_(alpha),
      tau_(tau),
      tau_alpha_(std::pow(tau, alpha)),
      steps_(steps),
      gamma_(std::move(gamma)),
      gamma_u_(std::move(gamma_u)),
      gamma_f_(std::move(gamma_f)),
      kappa_(kappa) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  if (kappa < 0.0) throw std::invalid_argument("kappa must be non-negative");
  omega_ = cq_weights(alpha, steps);
  start_.assign((steps + 1) * m(), 0.0);
  e2u_.assign((steps + 1) * m_u(), 0.0);
  e2f_.assign((steps + 1) * m_f(), 0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    const auto w = starting_weights(alpha, gamma_, n, omega_);
    std::copy(w.begin(), w.end(), start_.begin() + static_cast<std::ptrdiff_t>(n * m()));
    if (n >= 2) {
      const auto wu = e2_weights(gamma_u_, n);
      const auto wf = e2_weights(gamma_f_, n);
      std::copy(wu.begin(), wu.end(), e2u_.begin() + static_cast<std::ptrdiff_t>(n * m_u()));
      std::copy(wf.begin(), wf.end(), e2f_.begin() + static_cast<std::ptrdiff_t>(n * m_f()));
    }
  }
}

FractionalScheme FractionalScheme::standard(double alpha, double tau, std::size_t steps, int m, double kappa) {
  auto g = default_exponents(alpha, m);
  return FractionalScheme(alpha, tau, steps, g, g, g, kappa);
}

std::size_t FractionalScheme::startup_steps() const {
  return std::max<std::size_t>({1, m(), m_u(), m_f()});
}

Eigen::VectorXd apply_d_tau(const FractionalScheme& s, std::span<const Eigen::VectorXd> h, std::size_t n) {
  if (n < 1 || h.size() < std::max(n, s.m()) + 1) throw std::invalid_argument("apply_d_tau: incomplete history");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(h[0].size());
  const auto& om = s.omega();
  for (std::size_t j = 1; j <= n; ++j) acc += om[n - j] * (h[j] - h[0]);
  const auto w = s.start(n);
  for (std::size_t j = 1; j <= w.size(); ++j) acc += w[j - 1] * (h[j] - h[0]);
  return acc / s.tau_alpha();
}

double apply_d_tau(const FractionalScheme& s, std::span<const double> h, std::size_t n) {
  if (n < 1 || h.size() < std::max(n, s.m()) + 1) throw std::invalid_argument("apply_d_tau: incomplete history");
  Accumulator acc;
  const auto& om = s.omega();
  for (std::size_t j = 1; j <= n; ++j) acc.add(static_cast<long double>(om[n - j]) * (h[j] - h[0]));
  const auto w = s.start(n);
  for (std::size_t j = 1; j <= w.size(); ++j) acc.add(static_cast<long double>(w[j - 1]) * (h[j] - h[0]));
  return static_cast<double>(acc.value()) / s.tau_alpha();
}

double apply_e2(std::span<const double> w, std::span<const double> h, std::size_t n) {
  if (n < 2 || h.size() < std::max(n, w.size()) + 1) throw std::invalid_argument("apply_e2: incomplete history");
  Accumulator acc;
  acc.add(h[n]);
  acc.add(-2.0 * h[n - 1]);
  acc.add(h[n - 2]);
  for (std::size_t j = 1; j <= w.size(); ++j) acc.add(-static_cast<long double>(w[j - 1]) * (h[j] - h[0]));
  return static_cast<double>(acc.value());
}

// ---------------------------------------------------------------- stepper

namespace {

struct FieldState {
  const TimeField* field;
  std::vector<Eigen::VectorXd> F;  // sparse use: levels <= m_f and the last two
};

Eigen::VectorXd block(const Eigen::VectorXd& c, const TimeField& f) { return c.segment(f.offset, f.size); }

// omega_0 c^0 - sum_{j=1}^{n-1} omega_{n-j} (c^j - c^0)
Eigen::VectorXd memory_part(const TimeField& f, const std::vector<Eigen::VectorXd>& c, std::size_t n) {
  const auto& om = f.scheme->omega();
  const Eigen::VectorXd c0 = block(c[0], f);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.size);
  double wsum = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    acc.noalias() += om[n - j] * c[j].segment(f.offset, f.size);
    wsum += om[n - j];
  }
  return om[0] * c0 - (acc - wsum * c0);
}

template <class Vec>
Eigen::VectorXd correction(std::span<const double> w, const Vec& level, const Eigen::VectorXd& base) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(base.size());
  for (std::size_t j = 1; j <= w.size(); ++j) acc += w[j - 1] * (level(j) - base);
  return acc;
}

}  // namespace

std::vector<Eigen::VectorXd> run_fractional_stepper(std::span<const TimeField> fields, const Eigen::VectorXd& c0,
                                                    const StepSolve& solve, const StepperOptions& opts,
                                                    const StepObserver& observer) {
  if (fields.empty()) throw std::invalid_argument("stepper needs at least one field");
  const std::size_t steps = fields[0].scheme->steps();
  const double tau = fields[0].scheme->tau();
  std::size_t n0 = 1;
  for (const auto& f : fields) {
    if (f.scheme->steps() != steps || f.scheme->tau() != tau) {
      throw std::invalid_argument("coupled fields must share the time grid");
    }
    n0 = std::max(n0, f.scheme->startup_steps());
  }
  n0 = std::min(n0, steps);

  std::vector<Eigen::VectorXd> c(steps + 1);
  c[0] = c0;
  std::vector<FieldState> st;
  for (const auto& f : fields) st.push_back({&f, std::vector<Eigen::VectorXd>(steps + 1)});

  auto reaction_at = [&](const TimeField& f, const Eigen::VectorXd& state, std::size_t n) {
    return f.reaction ? f.reaction(block(state, f), static_cast<double>(n) * tau) : Eigen::VectorXd();
  };
  auto assemble = [&](const std::vector<Eigen::VectorXd>& parts) {
    Eigen::Index rows = 0;
    for (const auto& p : parts) rows += p.size();
    Eigen::VectorXd out(rows);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      out.segment(off, p.size()) = p;
      off += p.size();
    }
    return out;
  };
  auto add_source = [](Eigen::VectorXd& rhs, const Eigen::VectorXd& src, double scale) {
    if (src.size() == 0) return;
    if (src.size() != rhs.size()) throw std::invalid_argument("reaction and lift sizes differ");
    rhs += scale * src;
  };
  for (auto& s : st) {
    if (!s.field->explicit_source) s.F[0] = reaction_at(*s.field, c[0], 0);
  }

  // Startup: implicit fixed point over levels 1..n0.
  for (std::size_t n = 1; n <= n0; ++n) c[n] = c0;
  bool converged = n0 == 0;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int sweep = 0; sweep < opts.startup_max_sweeps && !converged; ++sweep) {
    double diff = 0.0;
    double scale = 1.0;
    for (std::size_t n = 1; n <= n0; ++n) {
      std::vector<Eigen::VectorXd> parts;
      for (const auto& s : st) {
        const TimeField& f = *s.field;
        const FractionalScheme& sc = *f.scheme;
        const Eigen::VectorXd b0 = block(c[0], f);
        const Eigen::VectorXd bn = block(c[n], f);
        Eigen::VectorXd mem = memory_part(f, c, n);
        mem -= correction(sc.start(n), [&](std::size_t j) { return block(c[j], f); }, b0);
        mem += sc.kappa() * sc.tau_alpha() * bn;
        Eigen::VectorXd rhs = f.lift(mem);
        add_source(rhs, reaction_at(f, c[n], n), sc.tau_alpha());
        parts.push_back(std::move(rhs));
      }
      Eigen::VectorXd next = solve(assemble(parts), n, c[n - 1]);
      diff = std::max(diff, (next - c[n]).lpNorm<Eigen::Infinity>());
      scale = std::max(scale, next.lpNorm<Eigen::Infinity>());
      c[n] = std::move(next);
    }
    if (!std::isfinite(diff)) throw NumericalError("startup iteration produced a non-finite state");
    converged = diff <= opts.startup_tol * scale;
    if (!converged && diff <= opts.startup_floor * scale) {
      if (diff > 0.5 * best) ++stalled;
      else stalled = 0;
      converged = stalled >= opts.startup_stall_sweeps;
    }
    best = std::min(best, diff);
  }
  if (!converged) {
    throw NumericalError("startup fixed-point iteration did not converge in " +
                         std::to_string(opts.startup_max_sweeps) + " sweeps");
  }
  for (std::size_t n = 1; n <= n0; ++n) {
    for (auto& s : st) {
      if (!s.field->explicit_source) s.F[n] = reaction_at(*s.field, c[n], n);
    }
    if (observer) observer(n, c[n]);
  }

  for (std::size_t n = n0 + 1; n <= steps; ++n) {
    std::vector<Eigen::VectorXd> parts;
    for (auto& s : st) {
      const TimeField& f = *s.field;
      const FractionalScheme& sc = *f.scheme;
      const Eigen::VectorXd b0 = block(c[0], f);
      Eigen::VectorXd mem = memory_part(f, c, n);
      mem -= correction(sc.start(n), [&](std::size_t j) { return block(c[j], f); }, b0);
      if (sc.kappa() != 0.0) {
        Eigen::VectorXd ext = 2.0 * block(c[n - 1], f) - block(c[n - 2], f);
        ext += correction(sc.e2_u(n), [&](std::size_t j) { return block(c[j], f); }, b0);
        mem += sc.kappa() * sc.tau_alpha() * ext;
      }
      Eigen::VectorXd rhs = f.lift(mem);
      if (f.explicit_source) {
        add_source(rhs, reaction_at(f, c[n - 1], n), sc.tau_alpha());
      } else if (f.reaction) {
        Eigen::VectorXd ext = 2.0 * s.F[n - 1] - s.F[n - 2];
        ext += correction(sc.e2_f(n), [&](std::size_t j) { return s.F[j]; }, s.F[0]);
        add_source(rhs, ext, sc.tau_alpha());
      }
      parts.push_back(std::move(rhs));
    }
    c[n] = solve(assemble(parts), n, c[n - 1]);
    if (!c[n].allFinite()) throw NumericalError("non-finite state at step " + std::to_string(n));
    for (auto& s : st) {
      if (s.field->explicit_source || !s.field->reaction) continue;
      s.F[n] = reaction_at(*s.field, c[n], n);
      const std::size_t drop = n - 2;
      if (drop > s.field->scheme->m_f() && drop > 0) s.F[drop] = Eigen::VectorXd();
    }
    if (observer) observer(n, c[n]);
  }
  return c;
}

FivpResult solve_fivp(double alpha, double nu, const std::function<double(double, double)>& f, double u0,
                      double kappa, double tau, int m, double T, std::vector<double> gamma) {
  if (gamma.empty()) gamma = default_exponents(alpha, m);
  const auto steps = static_cast<std::size_t>(std::llround(T / tau));
  FractionalScheme scheme(alpha, tau, steps, gamma, gamma, gamma, kappa);
  TimeField field;
  field.scheme = &scheme;
  field.offset = 0;
  field.size = 1;
  field.lift = [](const Eigen::VectorXd& v) { return v; };
  field.reaction = [&](const Eigen::VectorXd& v, double t) {
    Eigen::VectorXd out(1);
    out[0] = f(v[0], t);
    return out;
  };
  const double lhs = scheme.omega()[0] + kappa * scheme.tau_alpha() - nu * scheme.tau_alpha();
  StepSolve solve = [&](const Eigen::VectorXd& rhs, std::size_t, const Eigen::VectorXd&) {
    return Eigen::VectorXd(rhs / lhs);
  };
  Eigen::VectorXd c0(1);
  c0[0] = u0;
  const std::array<TimeField, 1> fields{field};
  const auto hist = run_fractional_stepper(fields, c0, solve);
  FivpResult out;
  for (std::size_t n = 0; n < hist.size(); ++n) {
    out.t.push_back(static_cast<double>(n) * tau);
    out.u.push_back(hist[n][0]);
  }
  return out;
}

}  // namespace fracollo
