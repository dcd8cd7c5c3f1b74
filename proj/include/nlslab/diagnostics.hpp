#ifndef NLSLAB_DIAGNOSTICS_HPP
#define NLSLAB_DIAGNOSTICS_HPP

#include <utility>
#include <vector>

#include "nlslab/decompose.hpp"

namespace nlslab {

// Radial cutoffs used by the virial functionals:
//  - chi_A(x) = A^2 chi(x/A), chi(x) = psi(|x|) with psi'(r) = r for
//    r <= 1, psi'(r) = 2 - exp(-r) for r >= 2, quintic Hermite bridge;
//  - phi_A(x) = phi(x/A), exponential plateau (1 inside, exp(-|x|) outside);
//  - varphi_A(x) = A^2 w(x/A), compact quadratic cutoff, w <= |x|^2.
class CutoffFamily {
 public:
  explicit CutoffFamily(double A = 10.0);

  double A() const { return A_; }

  double psi(double r) const;
  double psi_p(double r) const;
  double psi_pp(double r) const;
  double psi_ppp(double r) const;

  double chiA(double r) const { return A_ * A_ * psi(r / A_); }
  // |grad chi_A| along the radial direction
  double grad_chiA(double r) const { return A_ * psi_p(r / A_); }

  double phiA(double r) const;      // exponential plateau, phi(r/A)
  double varphiA(double r) const;   // A^2 w(r/A)

  double varphi_profile(double r) const;  // w(r) itself

 private:
  double A_;
  // bridge on m(r) = psi'(r)/r over (1,2): m' = -(a t^5 + b t^4), t = r-1,
  // which keeps psi'/r - psi'' = -r m' >= 0 with psi', psi'' matched at
  // both ends (a plain quintic Hermite in psi' cannot satisfy that sign)
  double a_ = 0.0, b_ = 0.0;
  double psi_at_2_ = 0.0;
};

// Localized virial functional and its modified variant.
double localized_virial(const Decomposition& dec, const CutoffFamily& cut,
                        const GroundState& gs, const Localization& loc);
double modified_localized_virial(const Decomposition& dec,
                                 const CutoffFamily& cut,
                                 const GroundState& gs,
                                 const Localization& loc);

// Modified generalized energy.
double generalized_energy(const Decomposition& dec, const CutoffFamily& cut,
                          const GroundState& gs, const Localization& loc);

// Interior virial with grad chi(x) = x for |x| <= 2 sigma.
double interior_virial(const Decomposition& dec,
                       const std::vector<std::array<double, 2>>& centers,
                       double sigma, const Localization& loc);

// The per-bubble Morawetz integral shared by the functionals above:
//   Im int (grad chi_A)((x-alpha_k)/lambda_k) . grad R conj(R) Phi_k dx
std::vector<double> morawetz_terms(const Decomposition& dec,
                                   const CutoffFamily& cut,
                                   const Localization& loc);

struct SolitonVirial {
  double I = 0.0;   // Im int x . grad z conj(z)
  double MA = 0.0;  // int varphi_A |z|^2
};
SolitonVirial soliton_virial(const Field& z, const CutoffFamily& cut);

// E(v) - sum_k omega_k^2 ||yQ||^2 / 8
double energy_quantization_check(const Field& v, const ProfileSpec& spec,
                                 const GroundState& gs);

enum class RateModel {
  power_T_minus_t,      // value ~ (T-t)^p
  exp_inverse_T_minus_t,  // value ~ exp(-delta/(T-t))
  power_of_t,           // value ~ t^p
};

struct RateFit {
  RateModel model;
  double exponent = 0.0;  // p, or delta for the exponential model
  double log_amplitude = 0.0;
  double residual = 0.0;  // rms residual in the linearizing coordinates
  double window_lo = 0.0, window_hi = 0.0;  // range of (T-t) or t
};

RateFit fit_rate(const std::vector<std::pair<double, double>>& series,
                 RateModel model, double T = 0.0);

struct DoubleAverage {
  std::vector<std::pair<double, double>> values;
  double tail_fraction = 0.0;
  bool tail_flagged = false;  // tail contributed > 10% at the first slice
};

// (1/(T-t)) int_t^T (1/(T-s)) int_s^T w(r) dr ds over the sample window,
// unresolved tail extrapolated by the fitted power model.
DoubleAverage double_average(
    const std::vector<std::pair<double, double>>& series, double T);

}  // namespace nlslab

#endif
