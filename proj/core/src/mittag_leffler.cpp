#include "fracollo/errors.hpp"
#include "fracollo/fractional_time.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracollo {

namespace {

long double series(long double alpha, long double z) {
  long double sum = 1.0L;
  long double comp = 0.0L;
  const long double lz = std::log(std::fabs(z));
  for (int k = 1; k < 4000; ++k) {
    const long double mag = std::exp(k * lz - std::lgamma(alpha * k + 1.0L));
    const long double term = (z < 0 && (k & 1)) ? -mag : mag;
    const long double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) comp += (sum - t) + term;
    else comp += (term - t) + sum;
    sum = t;
    if (mag < 1e-22L * std::fabs(sum)) break;
  }
  return sum + comp;
}

struct KernelParams {
  double inv_alpha;
  double t;
  double c;
};

double kernel(double u, void* data) {
  const auto* p = static_cast<const KernelParams*>(data);
  const double e = std::exp(-p->t * std::pow(u, p->inv_alpha));
  return e / (u * u + 2.0 * u * p->c + 1.0);
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

// E_alpha(-x) for x > 1 and 0 < alpha < 1 through the positive real
// integral representation, in the variable u = r^alpha.
double integral_branch(double alpha, double x) {
  const double t = std::pow(x, 1.0 / alpha);
  const double c = std::cos(alpha * M_PI);
  const double u_max = std::pow(745.0 / t, alpha);
  std::vector<double> pts{0.0};
  for (double b = std::pow(t, -alpha) / 64.0; b < u_max; b *= 2.0) pts.push_back(b);
  if (c < 0.0 && -c < u_max) pts.push_back(-c);
  pts.push_back(u_max);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  KernelParams par{1.0 / alpha, t, c};
  gsl_function fn{&kernel, &par};
  constexpr std::size_t limit = 2000;
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(gsl_integration_workspace_alloc(limit));
  double result = 0.0;
  double abserr = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status =
      gsl_integration_qagp(&fn, pts.data(), pts.size(), 0.0, 1.2e-14, limit, ws.get(), &result, &abserr);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw NumericalError(std::string("Mittag-Leffler quadrature failed: ") + gsl_strerror(status));
  }
  return std::sin(alpha * M_PI) / (alpha * M_PI) * result;
}

}  // namespace

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("Mittag-Leffler order must lie in (0, 1]");
  if (!(z <= 0.0)) throw std::invalid_argument("Mittag-Leffler argument must be real and non-positive");
  if (alpha == 1.0) return std::exp(z);
  if (z == 0.0) return 1.0;
  if (z >= -1.0) return static_cast<double>(series(alpha, z));
  return integral_branch(alpha, -z);
}

}  // namespace fracollo
