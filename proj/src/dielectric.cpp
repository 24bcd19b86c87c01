#include "qdot/dielectric.hpp"

#include <cmath>
#include <string>

#include "qdot/error.hpp"
#include "qdot/simd/kernels.hpp"
#include "qdot/units.hpp"

namespace qdot {

double ImageCoefficients::p() const { return p_scaled * std::pow(a, 2 * l + 1); }
double ImageCoefficients::q() const { return q_scaled * std::pow(b, -(2 * l + 1)); }

ImageCoefficients image_coefficients(const Device& device, int l) {
  const double e1 = device.eps_well(), e2 = device.eps_barrier();
  ImageCoefficients c;
  c.l = l;
  c.a = device.a;
  c.b = device.b;
  c.p_scaled = (e1 - e2) * l / (e2 * l + e1 * (l + 1));
  c.q_scaled = (e1 - e2) * (l + 1) / (e1 * l + e2 * (l + 1));
  c.pq = device.a > 0.0 ? c.p_scaled * c.q_scaled * std::pow(device.a / device.b, 2 * l + 1) : 0.0;
  return c;
}

double selfpol_potential(const Device& device, double r, int lmax, ImageForm form) {
  if (lmax < 0) throw Error(ErrorCode::InvalidValue, "lmax must be >= 0");
  if (!device.in_well(r)) return 0.0;
  const double pref = units::coulomb_k / (2.0 * device.eps_well());
  const double x = (r / device.b) * (r / device.b);
  const double y = device.a > 0.0 ? (device.a / r) * (device.a / r) : 0.0;
  const double cross = form == ImageForm::Corrected ? 2.0 : 1.0;
  const double core = form == ImageForm::Corrected ? device.a / (r * r) : device.a / r;
  double sum = 0.0, term = 0.0;
  double xl = 1.0, yl = 1.0;
  for (int l = 0; l <= lmax; ++l) {
    const ImageCoefficients c = image_coefficients(device, l);
    term = (c.q_scaled * xl / device.b + c.p_scaled * yl * core + cross * c.pq / r) / (1.0 - c.pq);
    sum += term;
    xl *= x;
    yl *= y;
  }
  if (std::abs(term) > 1e-10 * std::abs(sum)) {
    throw Error(ErrorCode::SeriesNotConverged,
                "r = " + std::to_string(r) + ", lmax = " + std::to_string(lmax));
  }
  return pref * sum;
}

SelfPolarization::SelfPolarization(const Device& device, int lmax, ImageForm form)
    : a_(device.a),
      b_(device.b),
      prefactor_(units::coulomb_k / (2.0 * device.eps_well())),
      cross_sum_(0.0),
      form_(form) {
  if (lmax < 0) throw Error(ErrorCode::InvalidValue, "lmax must be >= 0");
  const double cross = form == ImageForm::Corrected ? 2.0 : 1.0;
  for (int l = 0; l <= lmax; ++l) {
    const ImageCoefficients c = image_coefficients(device, l);
    A_.push_back(c.q_scaled / (1.0 - c.pq));
    B_.push_back(c.p_scaled / (1.0 - c.pq));
    cross_sum_ += cross * c.pq / (1.0 - c.pq);
  }
}

void SelfPolarization::evaluate(std::span<const double> r, std::span<double> out) const {
  const std::size_t n = r.size();
  std::vector<double> x(n), y(n), sa(n), sb(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (r[i] / b_) * (r[i] / b_);
    y[i] = a_ > 0.0 ? (a_ / r[i]) * (a_ / r[i]) : 0.0;
  }
  simd::kernels().dual_power_series(x.data(), y.data(), n, A_.data(), B_.data(), A_.size(), sa.data(), sb.data());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r[i] > a_ && r[i] < b_)) {
      out[i] = 0.0;
      continue;
    }
    const double core = form_ == ImageForm::Corrected ? a_ / (r[i] * r[i]) : a_ / r[i];
    out[i] = prefactor_ * (sa[i] / b_ + core * sb[i] + cross_sum_ / r[i]);
  }
}

double SelfPolarization::operator()(double r) const {
  double out = 0.0;
  evaluate(std::span<const double>(&r, 1), std::span<double>(&out, 1));
  return out;
}

}  // namespace qdot
