#ifndef NLSLAB_PROFILES_HPP
#define NLSLAB_PROFILES_HPP

#include <array>
#include <vector>

#include "nlslab/grid.hpp"
#include "nlslab/groundstate.hpp"

namespace nlslab {

// Physical per-bubble parameters.  In the soliton frame `center` is the
// propagation speed v_k; in the blow-up frame it is the blow-up point x_k.
struct ProfileSpec {
  enum class Frame { soliton, blowup };
  Frame frame = Frame::blowup;
  int K = 1;
  double T = 0.0;  // blow-up time (blow-up frame only)
  struct Bubble {
    double omega = 1.0;
    std::array<double, 2> center = {0.0, 0.0};
    double vartheta = 0.0;
  };
  std::vector<Bubble> bubbles;
};

// Modulation parameters of the geometrical decomposition at one slice.
struct ModParams {
  double t = 0.0;
  struct Bubble {
    double lambda = 1.0;
    std::array<double, 2> alpha = {0.0, 0.0};
    std::array<double, 2> beta = {0.0, 0.0};
    double gamma = 0.0;
    double theta = 0.0;
  };
  std::vector<Bubble> bubbles;
};

Field make_W(const GroundState& gs, const ProfileSpec& spec, int k, double t,
             const Grid& grid);
Field make_S(const GroundState& gs, const ProfileSpec& spec, int k, double t,
             const Grid& grid);
Field make_W_sum(const GroundState& gs, const ProfileSpec& spec, double t,
                 const Grid& grid);
Field make_S_sum(const GroundState& gs, const ProfileSpec& spec, double t,
                 const Grid& grid);

// U = sum_k lambda_k^{-d/2} Q_k((x-alpha_k)/lambda_k) e^{i theta_k},
// Q_k(y) = Q(y) e^{i(beta_k.y - gamma_k |y|^2 / 4)}.
Field make_U(const GroundState& gs, const ModParams& p, const Grid& grid);
Field make_U_bubble(const GroundState& gs, const ModParams::Bubble& b,
                    const Grid& grid);

// Modulation parameters that reproduce the pseudo-conformal profiles:
// (omega_k(T-t), x_k, 0, omega_k^2(T-t), omega_k^{-2}(T-t)^{-1}+vartheta_k).
ModParams pseudo_conformal_params(const ProfileSpec& spec, double t);

// Trigonometric evaluation of u at the affine points a*x + b, x running
// over the target grid (periodic extension of the source box is an error).
Field resample_affine(const Field& u, const Grid& target,
                      std::array<double, 2> a, std::array<double, 2> b);

struct SymmetryParams {
  double lambda0 = 1.0;
  std::array<double, 2> beta0 = {0.0, 0.0};
  double theta0 = 0.0;
  std::array<double, 2> x0 = {0.0, 0.0};
  double t0 = 0.0;
};

// Single application of the symmetry transform: the input snapshot must
// carry time s = (t - t0)/lambda0^2; the result carries time t.
Field symmetry_transform(const Field& u_snapshot, const SymmetryParams& p,
                         double t, const Grid& target);

// Pseudo-conformal transform: input snapshot at time s = 1/(T-t),
// output at time t < T, and its inverse.
Field pseudo_conformal(const Field& u_snapshot, double T, double t,
                       const Grid& target);
Field pseudo_conformal_inverse(const Field& v_snapshot, double T,
                               const Grid& target);

}  // namespace nlslab

#endif
