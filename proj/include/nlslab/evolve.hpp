#ifndef NLSLAB_EVOLVE_HPP
#define NLSLAB_EVOLVE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"

namespace nlslab {

struct SolverConfig {
  double dt0 = 1e-3;
  double cfl_blowup = 0.0;  // dt = cfl_blowup * lambda_min^2; 0 disables
  double t_end = 1.0;
  bool dealias = true;  // 2/3 rule in the linear substep
  double drift_tol = 1e-8;
  int snapshot_stride = 16;
  double stop_scale_h = 8.0;  // stop when lambda_min < stop_scale_h * h
  std::uint64_t max_steps = 50'000'000;
  // Current minimal bubble scale; defaults to ||grad Q|| / ||grad u||
  // when empty (an underestimate for bubble sums).
  std::function<double(const Field&, double)> scale_estimate;
};

struct LedgerRow {
  double t = 0, mass = 0, energy = 0, mom_x = 0, mom_y = 0, dt = 0;
  double grad_l2 = 0;  // internal, not part of the CSV schema
};

struct Trajectory {
  std::vector<Field> snapshots;
  std::vector<LedgerRow> ledger;
  Status stop_reason = Status::ok;  // ok = reached t_end
  double t_final = 0.0;
};

// One Strang split step: half nonlinear phase rotation, full linear
// spectral step, half nonlinear.
Field step(const Field& u, double dt, const SolverConfig& cfg);

Trajectory run(const Field& u0, const SolverConfig& cfg);

// Least-squares fit of 1/||grad u(t)|| as affine in t over the final
// third of the series; returns the root.
double estimate_blowup_time(const std::vector<std::pair<double, double>>&
                                grad_norm_series);
double estimate_blowup_time(const Trajectory& traj);

// Sampled weight for the local virial identities, with the analytic
// derivative fields supplied by the factory.
struct VirialWeight {
  std::vector<double> phi;
  std::vector<double> grad[2];
  std::vector<double> hess[2][2];
  std::vector<double> lap;
  std::vector<double> bilap;
};

VirialWeight quadratic_weight(const Grid& g);  // |x|^2, unwrapped

struct VirialCheckRow {
  double t;
  double lhs_first, rhs_first;    // d/dt int Phi |v|^2 vs 2 Im int ...
  double lhs_second, rhs_second;  // d/dt Im int ... vs second identity rhs
};

struct VirialCheckReport {
  std::vector<VirialCheckRow> rows;
  double max_first = 0.0;   // max |lhs-rhs| of the first identity
  double max_second = 0.0;  // max |lhs-rhs| of the second identity
};

VirialCheckReport virial_second_derivative_check(const Trajectory& traj,
                                                 const VirialWeight& w);

}  // namespace nlslab

#endif
