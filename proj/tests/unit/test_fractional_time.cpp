#include "fracollo/fractional_time.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

using namespace fracollo;

namespace {

std::vector<double> powers(double gamma, double tau, std::size_t n) {
  std::vector<double> h(n + 1);
  for (std::size_t j = 0; j <= n; ++j) h[j] = std::pow(static_cast<double>(j) * tau, gamma);
  return h;
}

double fivp_error(double alpha, int m, double tau, double T, const std::function<double(double)>& exact) {
  const auto r = solve_fivp(alpha, -1.0, [](double, double) { return 0.0; }, 1.0, 0.0, tau, m, T);
  return std::abs(r.u.back() - exact(r.t.back()));
}

}  // namespace

TEST_CASE("CQ weights") {
  const auto w = cq_weights(1.0, 6);
  CHECK(w[0] == 1.5);
  CHECK(w[1] == -2.0);
  CHECK(w[2] == 0.5);
  for (std::size_t k = 3; k < w.size(); ++k) CHECK(w[k] == 0.0);
  for (double a : {0.1, 0.37, 0.8}) CHECK(cq_weights(a, 0)[0] == doctest::Approx(1 + a / 2));
  // Partial sums decay like N^-alpha / Gamma(1 - alpha).
  const auto h = cq_weights(0.5, 10000);
  CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(0.0056417547858776404).epsilon(1e-10));
  const auto big = cq_weights(0.5, 1000000);
  CHECK(std::abs(std::accumulate(big.begin(), big.end(), 0.0)) <= 1e-3);
}

TEST_CASE("starting weights make the operator exact on t^gamma") {
  CHECK(starting_weights(0.5, {}, 10, cq_weights(0.5, 10)).empty());
  const double alpha = 0.5;
  const double tau = 1.0 / 1024;
  SUBCASE("m = 1") {
    const auto s = FractionalScheme::standard(alpha, tau, 1024, 1, 0.0);
    const auto h = powers(alpha, tau, 1024);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 1024; ++n) {
      const double exact = std::tgamma(alpha + 1);
      worst = std::max(worst, std::abs(apply_d_tau(s, h, n) - exact) / exact);
    }
    CHECK(worst <= 1e-10);
  }
  SUBCASE("m = 3") {
    const auto s = FractionalScheme::standard(alpha, tau, 1024, 3, 0.0);
    for (int k = 1; k <= 3; ++k) {
      const double g = k * alpha;
      const auto h = powers(g, tau, 1024);
      double worst = 0.0;
      for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{500}, std::size_t{1024}}) {
        const double t = static_cast<double>(n) * tau;
        const double exact = std::tgamma(g + 1) / std::tgamma(g + 1 - alpha) * std::pow(t, g - alpha);
        worst = std::max(worst, std::abs(apply_d_tau(s, h, n) - exact) / exact);
      }
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("constant history has zero derivative") {
  const auto s = FractionalScheme::standard(0.3, 0.01, 50, 2, 0.0);
  const std::vector<double> h(51, 2.5);
  for (std::size_t n = 1; n <= 50; ++n) CHECK(apply_d_tau(s, h, n) == 0.0);
}

TEST_CASE("alpha = 1 without corrections is BDF2") {
  double prev = 0.0;
  for (int steps : {32, 64, 128, 256}) {
    const double tau = 1.0 / steps;
    const auto s = FractionalScheme::standard(1.0, tau, static_cast<std::size_t>(steps), 0, 0.0);
    const auto h = powers(2.0, tau, static_cast<std::size_t>(steps));
    const auto n = static_cast<std::size_t>(steps);
    const double bdf2 = (1.5 * h[n] - 2.0 * h[n - 1] + 0.5 * h[n - 2]) / tau;
    CHECK(std::abs(apply_d_tau(s, h, n) - bdf2) < 1e-12);
    const double err = std::abs(apply_d_tau(s, h, n) - 2.0);
    if (prev > 0.0) CHECK(std::abs(std::log2(prev / err) - 2.0) <= 0.1);
    prev = err;
  }
}

TEST_CASE("E2 extrapolation") {
  const std::vector<double> lin{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  for (std::size_t n = 2; n < lin.size(); ++n) CHECK(apply_e2({}, lin, n) == 0.0);
  const std::vector<double> w{1.0, 4.0, 2.0};
  CHECK(apply_e2({}, w, 2) == 2.0 - 8.0 + 1.0);

  const std::vector<double> gamma{0.5};
  const auto h = powers(0.5, 0.01, 200);
  for (std::size_t n = 3; n <= 200; ++n) {
    const auto ew = e2_weights(gamma, n);
    CHECK(std::abs(apply_e2(ew, h, n)) <= 1e-12);
  }
  const std::vector<double> g3{0.4, 0.8, 1.2};
  for (const double g : g3) {
    const auto hg = powers(g, 0.01, 100);
    for (std::size_t n = 4; n <= 100; n += 13) CHECK(std::abs(apply_e2(e2_weights(g3, n), hg, n)) <= 1e-12);
  }
}

TEST_CASE("Mittag-Leffler values") {
  for (double a : {0.1, 0.5, 0.8, 1.0}) CHECK(mittag_leffler(a, 0.0) == 1.0);
  CHECK(mittag_leffler(1.0, -1.0) == doctest::Approx(0.3678794412).epsilon(1e-10));
  CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(0.4275835762).epsilon(1e-9));
}

TEST_CASE("Mittag-Leffler against the extended precision oracle") {
  std::ifstream in(FRACOLLO_TEST_DATA "/mittag_leffler.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  int rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string a, z, v;
    std::getline(ss, a, ',');
    std::getline(ss, z, ',');
    std::getline(ss, v, ',');
    const double ref = std::stod(v);
    const double got = mittag_leffler(std::stod(a), std::stod(z));
    worst = std::max(worst, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
    ++rows;
  }
  CHECK(rows == 52);
  CHECK(worst <= 1e-10);
}

TEST_CASE("fractional IVP convergence") {
  SUBCASE("alpha = 1, exponential") {
    auto exact = [](double t) { return std::exp(-t); };
    double prev = 0.0;
    for (double tau : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
      const double e = fivp_error(1.0, 1, tau, 1.0, exact);
      if (prev > 0.0) CHECK(std::abs(std::log2(prev / e) - 2.0) <= 0.1);
      prev = e;
    }
  }
  SUBCASE("alpha = 0.5, Mittag-Leffler") {
    auto exact = [](double t) { return mittag_leffler(0.5, -std::sqrt(t)); };
    double prev = 0.0;
    for (double tau : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
      const double e = fivp_error(0.5, 3, tau, 1.0, exact);
      if (prev > 0.0) CHECK(std::abs(std::log2(prev / e) - 2.0) <= 0.2);
      prev = e;
    }
  }
  SUBCASE("constant solution") {
    const auto r = solve_fivp(0.6, -2.0, [](double, double) { return 2.0 * 0.7; }, 0.7, 1.0, 0.05, 2, 2.0);
    for (double u : r.u) CHECK(std::abs(u - 0.7) <= 1e-12);
  }
}

TEST_CASE("scheme invariants") {
  const auto s = FractionalScheme::standard(0.4, 0.1, 20, 3, 1.5);
  CHECK(s.omega()[0] == doctest::Approx(1.2));
  CHECK(s.tau_alpha() == doctest::Approx(std::pow(0.1, 0.4)));
  const auto g = default_exponents(0.4, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[2] == doctest::Approx(1.2));
  CHECK(s.m() == 3);
  CHECK_THROWS(FractionalScheme::standard(0.5, 0.0, 10, 1, 0.0));
  CHECK_THROWS(FractionalScheme::standard(0.5, 0.1, 10, 1, -1.0));
}
