#include "nlslab.h"

#include <cstring>
#include <fstream>
#include <string>

#include "nlslab/errors.hpp"
#include "nlslab/experiment.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/io.hpp"

namespace {

thread_local std::string g_last_error;

nlslab_status to_c_status(nlslab::Status s) {
  using S = nlslab::Status;
  switch (s) {
    case S::ok: return NLSLAB_OK;
    case S::invalid_argument: return NLSLAB_ERR_INVALID_ARGUMENT;
    case S::no_convergence: return NLSLAB_ERR_NO_CONVERGENCE;
    case S::singular_system: return NLSLAB_ERR_SINGULAR_SYSTEM;
    case S::shape_mismatch: return NLSLAB_ERR_SHAPE_MISMATCH;
    case S::boundary_mass: return NLSLAB_ERR_BOUNDARY_MASS;
    case S::resolution_exceeded: return NLSLAB_ERR_RESOLUTION_EXCEEDED;
    case S::drift_exceeded: return NLSLAB_ERR_DRIFT_EXCEEDED;
    case S::non_finite: return NLSLAB_ERR_NON_FINITE;
    case S::not_blowing_up: return NLSLAB_ERR_NOT_BLOWING_UP;
    case S::insufficient_data: return NLSLAB_ERR_INSUFFICIENT_DATA;
    case S::degenerate_centers: return NLSLAB_ERR_DEGENERATE_CENTERS;
    case S::config_invalid: return NLSLAB_ERR_CONFIG_INVALID;
    case S::io_error: return NLSLAB_ERR_IO;
    case S::internal: return NLSLAB_ERR_INTERNAL;
  }
  return NLSLAB_ERR_INTERNAL;
}

template <typename Fn>
nlslab_status guarded(Fn&& fn) {
  try {
    fn();
    return NLSLAB_OK;
  } catch (const nlslab::Error& e) {
    g_last_error = e.what();
    return to_c_status(e.status());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NLSLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return NLSLAB_ERR_INTERNAL;
  }
}

}  // namespace

struct nlslab_groundstate {
  nlslab::GroundState gs;
  double tol;
};

extern "C" {

const char* nlslab_version(void) { return nlslab::io::kVersion; }

const char* nlslab_last_error(void) { return g_last_error.c_str(); }

nlslab_status nlslab_groundstate_solve(int dim, double r_max, int n,
                                       double tol,
                                       nlslab_groundstate** out) {
  if (!out) {
    g_last_error = "out pointer is null";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] {
    auto gs = nlslab::GroundState::compute(dim, r_max, n, tol);
    *out = new nlslab_groundstate{std::move(gs), tol};
  });
}

nlslab_status nlslab_groundstate_constants_get(
    const nlslab_groundstate* gs, nlslab_groundstate_constants* out) {
  if (!gs || !out) {
    g_last_error = "null handle";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  const auto& c = gs->gs.constants();
  out->mass_q = c.massQ;
  out->xq2 = c.xQ2;
  out->rho_xq = c.rho_xq;
  out->grad_q2 = c.gradQ2;
  out->energy_q = gs->gs.energyQ();
  return NLSLAB_OK;
}

nlslab_status nlslab_groundstate_eval(const nlslab_groundstate* gs,
                                      int which, const double* r,
                                      double* out, size_t count) {
  if (!gs || !r || !out) {
    g_last_error = "null argument";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  if (which != 0 && which != 1) {
    g_last_error = "which must be 0 (Q) or 1 (rho)";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    for (size_t i = 0; i < count; ++i)
      out[i] = which == 0 ? gs->gs.Q(r[i]) : gs->gs.rho(r[i]);
  });
}

nlslab_status nlslab_groundstate_write_table(const nlslab_groundstate* gs,
                                             const char* path) {
  if (!gs || !path) {
    g_last_error = "null argument";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { nlslab::io::write_profile_table(gs->gs, gs->tol, path); });
}

void nlslab_groundstate_free(nlslab_groundstate* gs) { delete gs; }

nlslab_status nlslab_run_experiment(const char* config_json,
                                    const char* out_dir,
                                    const char* const* overrides,
                                    size_t n_overrides, long long seed,
                                    int* exit_status) {
  if (!config_json || !out_dir || !exit_status) {
    g_last_error = "null argument";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::vector<std::string> ov;
    for (size_t i = 0; i < n_overrides; ++i) ov.emplace_back(overrides[i]);
    *exit_status = nlslab::run_experiment_json(config_json, out_dir, ov,
                                               seed);
  });
}

nlslab_status nlslab_compare_trajectories(const char* dir_a,
                                          const char* dir_b,
                                          const char* norm,
                                          const char* out_csv) {
  if (!dir_a || !dir_b || !norm || !out_csv) {
    g_last_error = "null argument";
    return NLSLAB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlslab::compare_trajectories(dir_a, dir_b, norm, out_csv);
  });
}

}  // extern "C"
