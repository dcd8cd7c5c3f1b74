#ifndef NLSLAB_GROUNDSTATE_HPP
#define NLSLAB_GROUNDSTATE_HPP

#include <span>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

// Real radial profile on the uniform grid r_i = i * r_max/(n-1).
struct RadialProfile {
  int d = 1;
  double r_max = 15.0;
  int n = 0;
  std::vector<double> values;

  double h() const { return r_max / (n - 1); }
  double r(int i) const { return i * h(); }
};

struct GroundStateConstants {
  double massQ = 0.0;   // ||Q||_{L2}^2
  double xQ2 = 0.0;     // ||xQ||_{L2}^2  (the paper's ||yQ||^2)
  double rho_xq = 0.0;  // <rho, |x|^2 Q>
  double gradQ2 = 0.0;  // ||grad Q||_{L2}^2
};

struct TailFit {
  double log_c = 0.0;
  double delta = 0.0;  // fitted decay rate, values ~ C exp(-delta r)
  double rms = 0.0;
};

// Solves Q'' + (d-1)/r Q' - Q + Q^{1+4/d} = 0, Q'(0)=0, Q decaying, by
// bisection on Q(0) with RK4 integration.  d=1 brackets around the
// closed form (3 sech^2(2x))^{1/4}; d=2 brackets around 2.2.
RadialProfile solve_ground_state(int d, double r_max, int n, double tol);

// Radial derivative samples produced alongside the shooting solution.
struct GroundStateSolve {
  RadialProfile q;
  std::vector<double> qprime;
  double q0 = 0.0;           // Q(0)
  double ode_residual = 0.0; // max 6th-order FD residual on the checked range
};
GroundStateSolve solve_ground_state_full(int d, double r_max, int n, double tol);

// L_+ rho = -|x|^2 Q on the radial grid: second-order tridiagonal solve
// polished by defect correction against the 6th-order stencil.
RadialProfile solve_rho(const RadialProfile& Q);

enum class LinOp { plus, minus };

// Radial function shapes: u = g(r) with even samples g, or one
// component u = x_i g(r) of a vector profile, passed as its odd
// on-axis samples w(r) = r g(r).
enum class RadialForm { scalar, x_times };

std::vector<double> apply_linearized(LinOp which, std::span<const double> g,
                                     const RadialProfile& Q,
                                     RadialForm form = RadialForm::scalar);

TailFit fit_exponential_tail(const RadialProfile& p);

// Ground state bundle with the cached constants the other modules use.
class GroundState {
 public:
  static GroundState compute(int d, double r_max = 15.0, int n = 4097,
                             double tol = 1e-9);

  int dim() const { return d_; }
  const RadialProfile& q_profile() const { return q_; }
  const RadialProfile& rho_profile() const { return rho_; }
  const std::vector<double>& qprime_samples() const { return qprime_; }
  const GroundStateConstants& constants() const { return c_; }

  double Q(double r) const;
  double Qprime(double r) const;
  double rho(double r) const;

  double energyQ() const { return energyQ_; }     // E(Q), Pohozaev ~ 0
  double int_q_pow() const { return int_q_pow_; } // integral Q^{2+4/d}
  double lambda_q2() const { return lambda_q2_; } // ||Lam Q||_{L2}^2
  double q0() const { return q0_; }
  double ode_residual() const { return ode_residual_; }

 private:
  int d_ = 1;
  RadialProfile q_, rho_;
  std::vector<double> qprime_;
  GroundStateConstants c_;
  double energyQ_ = 0.0, int_q_pow_ = 0.0, lambda_q2_ = 0.0, q0_ = 0.0;
  double ode_residual_ = 0.0;
  // exponential continuation past the table end keeps sampled profiles
  // jump-free for spectral differentiation
  double ext_r_ = 0.0;
  double ext_q_ = 0.0, ext_kq_ = 1.0;
  double ext_rho_ = 0.0, ext_krho_ = 1.0;
};

// Linearized operator on a Cartesian field:
//   L_+ f = (-Lap + 1 - (1+4/d) Q^{4/d}) f,   L_- f = (-Lap + 1 - Q^{4/d}) f,
// with Q centered at the origin of the grid.
Field apply_linearized(LinOp which, const Field& f, const GroundState& gs);

// Scal(f) = <f1,Q>^2 + <f1,xQ>^2 + <f1,|x|^2Q>^2
//         + <f2,grad Q>^2 + <f2,Lam Q>^2 + <f2,rho>^2,  f = f1 + i f2.
double scal(const Field& f, const GroundState& gs);

// Orthogonal projection of f off the six unstable directions (used to
// build null-direction-free perturbations for the synthetic tests).
Field project_off_unstable(const Field& f, const GroundState& gs);

// d=1 closed form (3 sech^2(2x))^{1/4}.
double closed_form_q1(double x);

// Radial quadrature: integral over R^d of w(r) with the surface factor.
double radial_integral(std::span<const double> w, double h, int d);

}  // namespace nlslab

#endif
