#include "fracollo/harness.hpp"

#include "fracollo/errors.hpp"
#include "fracollo/parallel.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace fracollo {

ErrorReport l2_error(const DofMap& dm, const Eigen::VectorXd& c, const SpaceFn& exact, const Domain& domain,
                     std::size_t lattice) {
  if (lattice < 2) throw std::invalid_argument("error lattice needs at least two points per side");
  const Box box = dm.mesh().box();
  const double hx = box.width() / static_cast<double>(lattice - 1);
  const double hy = box.height() / static_cast<double>(lattice - 1);
  double se = 0.0;
  double su = 0.0;
  for (std::size_t j = 0; j < lattice; ++j) {
    for (std::size_t i = 0; i < lattice; ++i) {
      const Point p{box.x_min + static_cast<double>(i) * hx, box.y_min + static_cast<double>(j) * hy};
      if (!domain.contains_closed(p)) continue;
      const double u = exact(p);
      const double e = dm.eval(c, p, Deriv::id) - u;
      se += e * e;
      su += u * u;
    }
  }
  ErrorReport r;
  r.lattice = lattice;
  r.l2_abs = std::sqrt(hx * hy * se);
  r.exact_norm = std::sqrt(hx * hy * su);
  r.l2_rel = r.exact_norm > 0.0 ? r.l2_abs / r.exact_norm : r.l2_abs;
  return r;
}

double observed_order(int n_a, double e_a, int n_b, double e_b) {
  return std::log(e_a / e_b) / std::log(static_cast<double>(n_b) / static_cast<double>(n_a));
}

double fitted_order(std::span<const int> ns, std::span<const double> errors) {
  if (ns.size() != errors.size() || ns.size() < 2) throw std::invalid_argument("fitted_order needs two or more rows");
  double mx = 0.0;
  double my = 0.0;
  const auto k = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(static_cast<double>(ns[i])) / k;
    my += std::log(errors[i]) / k;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(static_cast<double>(ns[i])) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

std::vector<StudyRow> convergence_study(std::span<const int> ns, const std::function<double(int)>& run) {
  std::vector<StudyRow> rows(ns.size());
  parallel_for(ns.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      StudyRow& row = rows[k];
      row.n = ns[k];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        row.error = run(row.n);
        if (!std::isfinite(row.error)) row.failure = "non-finite error";
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  }, 1);
  const StudyRow* prev = nullptr;
  for (auto& row : rows) {
    if (!row.failure.empty()) continue;
    if (prev != nullptr && row.error > 0.0 && prev->error > 0.0) {
      row.order = observed_order(prev->n, prev->error, row.n, row.error);
    }
    prev = &row;
  }
  return rows;
}

void export_field(const DofMap& dm, const Eigen::VectorXd& c, const Domain& domain, std::size_t nx,
                  std::size_t ny, const std::filesystem::path& path) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("export lattice needs at least two points per side");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const Box box = dm.mesh().box();
  out << "x,y,value,inside\n" << std::setprecision(17);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Point p{box.x_min + box.width() * static_cast<double>(i) / static_cast<double>(nx - 1),
                    box.y_min + box.height() * static_cast<double>(j) / static_cast<double>(ny - 1)};
      const double v = dm.mesh().locate(p) ? dm.eval(c, p, Deriv::id) : 0.0;
      out << p.x << ',' << p.y << ',' << v << ',' << (domain.contains_closed(p) ? 1 : 0) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_study(const std::vector<StudyRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "N,error,order,seconds,failure\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.n << ',' << r.error << ',';
    if (r.order) out << *r.order;
    out << ',' << r.seconds << ",\"" << r.failure << "\"\n";
  }
}

}  // namespace fracollo
