#pragma once

#include <span>
#include <vector>

#include "qdot/materials.hpp"

namespace qdot {

/// Which algebraic form of the image-charge terms to use. Corrected is the
/// Green-function solution of the layered Poisson problem: the core term of
/// multipole l falls off as r^-(l+1) in the kernel and r^-(2l+2) in the self
/// energy. Printed is the compatibility variant with r^(l+1), r^-(2l+1) and a
/// single pq/r cross term.
enum class ImageForm { Corrected, Printed };

/// Image coefficients of multipole l for a charge inside the well:
///   p_l = (eps1-eps2) l a^(2l+1) / (eps2 l + eps1 (l+1))
///   q_l = (eps1-eps2) (l+1) b^-(2l+1) / (eps1 l + eps2 (l+1))
/// with eps1 the well and eps2 the core/clad permittivity. The dimensionless
/// parts p_l a^-(2l+1) and q_l b^(2l+1) are kept separately so large l does
/// not under/overflow.
struct ImageCoefficients {
  int l = 0;
  double p_scaled = 0.0;  ///< p_l / a^(2l+1)
  double q_scaled = 0.0;  ///< q_l * b^(2l+1)
  double pq = 0.0;        ///< p_l q_l (dimensionless)
  double a = 0.0;
  double b = 0.0;

  double p() const;
  double q() const;
};

ImageCoefficients image_coefficients(const Device& device, int l);

/// Self-polarisation (image) potential of a single carrier at radius r:
///   V_s = e^2/(2 eps1) sum_{l<=lmax} [q r^2l + p r^-(2l+2) + 2 p q / r] / (1 - p q)
/// Zero outside the open well (a, b). Throws SeriesNotConverged when the last
/// retained term exceeds 1e-10 of the partial sum.
double selfpol_potential(const Device& device, double r, int lmax, ImageForm form = ImageForm::Corrected);

/// Vectorised evaluation of the same truncated series at many radii without
/// the convergence check; near the interfaces the cutoff lmax acts as the
/// regularisation of the 1/distance image singularity.
class SelfPolarization {
 public:
  SelfPolarization(const Device& device, int lmax, ImageForm form = ImageForm::Corrected);

  void evaluate(std::span<const double> r, std::span<double> out) const;
  double operator()(double r) const;

 private:
  double a_, b_, prefactor_, cross_sum_;
  ImageForm form_;
  std::vector<double> A_, B_;
};

}  // namespace qdot
