#ifndef NLSLAB_DECOMPOSE_HPP
#define NLSLAB_DECOMPOSE_HPP

#include <optional>
#include <vector>

#include "nlslab/evolve.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

// Smooth partition of unity separating the bubbles along a direction
// with distinct projections.
struct Localization {
  int K = 1;
  double sigma = 0.0;                   // (1/12) min projected gap
  std::array<double, 2> v1 = {1.0, 0.0};
  std::vector<std::vector<double>> phi; // K sampled cutoffs
  double grad_phi_bound = 0.0;          // sup |grad Phi|
  Grid grid;
  std::vector<int> order;               // centers sorted along v1
};

Localization build_localization(const std::vector<std::array<double, 2>>&
                                    centers,
                                const Grid& grid);

// Virial-identity weight built from Phi_k (analytic derivatives of the
// smoothstep transition profile).
VirialWeight localization_virial_weight(
    const std::vector<std::array<double, 2>>& centers, const Grid& grid,
    int k);

struct Decomposition {
  ModParams params;
  Field remainder;                // R = v - U(params)
  std::vector<Field> localized;   // R_k = R Phi_k
  double residual = 0.0;          // max orthogonality residual
  int newton_iters = 0;
};

struct DecomposeOptions {
  double ortho_tol = 1e-10;
  int max_iters = 25;
  double fd_step = 1e-7;  // relative FD step for the Jacobian
};

// Newton iteration on the rescaled parameters solving the 3+2d
// orthogonality conditions per bubble.
Decomposition decompose(const Field& v, const ModParams& guess,
                        const ProfileSpec& spec, const GroundState& gs,
                        const Localization& loc,
                        const DecomposeOptions& opts = {});

// Raw orthogonality functionals at given parameters (diagnostic surface).
std::vector<double> orthogonality_residuals(const Field& v,
                                            const ModParams& p,
                                            const GroundState& gs);

// M_k = 2 Re <R_k, U_k> + int |R|^2 Phi_k
std::vector<double> localized_mass(const Decomposition& dec,
                                   const GroundState& gs,
                                   const Localization& loc);

struct ModulationSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> mod_k;  // [slice][bubble]
  std::vector<double> mod;                 // sum over bubbles
  std::vector<ModParams> dots;             // time derivatives per slice
};

// Centered differences over uniformly spaced parameter slices
// (one-sided at the endpoints); needs >= 3 slices.
ModulationSeries modulation_residuals(const std::vector<ModParams>& track);

struct RemainderScalars {
  double D = 0.0;  // ||R|| + (T-t)||grad R||
  double P = 0.0;  // sum |lambda| + |alpha - x_k| + |beta| + |gamma|
  std::vector<Field> eps;  // renormalized remainders on the Q-frame grids
};

RemainderScalars remainder_scalars(const Decomposition& dec,
                                   const ProfileSpec& spec, double T,
                                   std::optional<Grid> qframe = {});

struct ProfileResidual {
  Field eta;
  double l2 = 0.0;
  double grad_l2 = 0.0;
};

// eta = i dU/dt + Lap U + |U|^{4/d} U assembled from the closed form in
// terms of the five modulation-equation combinations.
ProfileResidual profile_residual(const ModParams& p, const ModParams& pdot,
                                 const GroundState& gs, const Grid& grid);

}  // namespace nlslab

#endif
