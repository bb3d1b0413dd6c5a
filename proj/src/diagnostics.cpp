#include <cmath>
#include <numeric>

#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace zamr {

namespace {

// Kahan-Babuska summation keeps totals reproducible to the last few ulps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

Totals totals(const Forest& f, const FieldArray& u) {
  if (u.size() != f.size()) throw ContractError("field size does not match the forest");
  std::array<CompensatedSum, kNumComponents> sums;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double vol = cell_geometry(f, i).volume;
    for (int k = 0; k < kNumComponents; ++k) sums[k].add(vol * u[i][k]);
  }
  Totals t;
  t.mass = sums[kRho].value();
  t.partial_mass = sums[kRhoY].value();
  for (int k = 0; k < 3; ++k) t.momentum[k] = sums[kMomX + k].value();
  return t;
}

double total_entropy(const Forest& f, const FieldArray& u, const Fluids& fp, double rho_ref) {
  if (u.size() != f.size()) throw ContractError("field size does not match the forest");
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double rho = u[i][kRho];
    const double y = u[i][kRhoY] / rho;
    const double kinetic = 0.5 * u[i].segment<3>(kMomX).squaredNorm() / rho;
    const double vol = cell_geometry(f, i).volume;
    s.add(vol * (rho * relative_free_energy(rho, y, fp, rho_ref) + kinetic));
  }
  return s.value();
}

ErrorNorms error_norms(const Forest& f, std::span<const double> err) {
  if (err.size() != f.size()) throw ContractError("error field size does not match the forest");
  CompensatedSum l1, l2;
  double linf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double vol = cell_geometry(f, i).volume;
    const double e = std::abs(err[i]);
    l1.add(vol * e);
    l2.add(vol * e * e);
    linf = std::max(linf, e);
  }
  return {l1.value(), std::sqrt(l2.value()), linf};
}

ErrorNorms alpha_error(const Forest& f, const FieldArray& u, const Fluids& fp,
                       const std::function<double(const Point&)>& exact) {
  if (u.size() != f.size()) throw ContractError("field size does not match the forest");
  std::vector<double> err(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double alpha = solve_alpha(u[i][kRho], u[i][kRhoY] / u[i][kRho], fp);
    err[i] = alpha - exact(cell_geometry(f, i).center);
  }
  return error_norms(f, err);
}

double l1_error(const Forest& f, const FieldArray& u, const Fluids& fp, const std::function<double(const Point&)>& exact) {
  return alpha_error(f, u, fp, exact).l1;
}

double l2_error(const Forest& f, const FieldArray& u, const Fluids& fp, const std::function<double(const Point&)>& exact) {
  return alpha_error(f, u, fp, exact).l2;
}

double convergence_rate(std::span<const double> errors, std::span<const double> dxs) {
  if (errors.size() != dxs.size()) throw ConfigError("convergence rate needs one error per mesh size");
  if (errors.size() < 2) throw ConfigError("convergence rate needs at least two points");
  const std::size_t n = errors.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !(dxs[i] > 0.0)) throw ConfigError("convergence rate needs positive errors and sizes");
    lx[i] = std::log(dxs[i]);
    ly[i] = std::log(errors[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("convergence rate needs distinct mesh sizes");
  return sxy / sxx;
}

}  // namespace zamr
