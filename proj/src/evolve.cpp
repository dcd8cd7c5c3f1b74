#include "nlslab/evolve.hpp"

#include <cmath>

#include "nlslab/fft.hpp"
#include "nlslab/field_ops.hpp"
#include "nlslab/numerics.hpp"

namespace nlslab {

namespace {

void nonlinear_half_step(Field& u, double dt) {
  for (auto& v : u.values) {
    const double a2 = std::norm(v);
    const double amp = u.grid.d == 1 ? a2 * a2 : a2;  // |u|^{4/d}
    v *= std::polar(1.0, 0.5 * dt * amp);
  }
}

void linear_step(Field& u, double dt, bool dealias) {
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  fft::forward(u.values, g);
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    const double k0 = g.wavenumber(0, i0);
    for (int i1 = 0; i1 < n1; ++i1) {
      double k2 = k0 * k0;
      bool cut = false;
      if (dealias && std::abs(i0 <= g.n[0] / 2 ? i0 : i0 - g.n[0]) >
                         g.n[0] / 3)
        cut = true;
      if (g.d == 2) {
        const double k1 = g.wavenumber(1, i1);
        k2 += k1 * k1;
        if (dealias &&
            std::abs(i1 <= g.n[1] / 2 ? i1 : i1 - g.n[1]) > g.n[1] / 3)
          cut = true;
      }
      const std::size_t id = u.idx(i0, i1);
      if (cut)
        u.values[id] = cplx(0.0, 0.0);
      else
        u.values[id] *= std::polar(1.0, -k2 * dt);
    }
  }
  fft::inverse(u.values, g);
}

bool all_finite(const Field& u) {
  for (const auto& v : u.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double default_scale_estimate(const Field& u, double grad_q_l2) {
  const double g = std::sqrt(grad_l2_sq(u));
  return g > 0 ? grad_q_l2 / g : 1e30;
}

LedgerRow make_ledger_row(const Field& u, double t, double dt) {
  LedgerRow row;
  row.t = t;
  row.dt = dt;
  const int d = u.grid.d;
  // one spectrum serves gradient, momentum and (with the physical-space
  // |u|^p sum) the energy
  auto hat = fft::spectrum(u);
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  double g2 = 0.0, mx = 0.0, my = 0.0;
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    const double k0 = g.wavenumber(0, i0);
    for (int i1 = 0; i1 < n1; ++i1) {
      const double k1 = g.d == 2 ? g.wavenumber(1, i1) : 0.0;
      const double p = std::norm(hat[static_cast<std::size_t>(i0) * n1 + i1]);
      g2 += (k0 * k0 + k1 * k1) * p;
      mx += k0 * p;
      my += k1 * p;
    }
  }
  const double scale = g.cell() / static_cast<double>(g.size());
  g2 *= scale;
  row.grad_l2 = std::sqrt(g2);
  row.mom_x = mx * scale;
  row.mom_y = my * scale;
  double m = 0.0, pp = 0.0;
  const double pexp = 2.0 + 4.0 / d;
  for (const auto& v : u.values) {
    m += std::norm(v);
    pp += std::pow(std::abs(v), pexp);
  }
  row.mass = m * g.cell();
  row.energy = 0.5 * g2 - (d / (2.0 * d + 4.0)) * pp * g.cell();
  return row;
}

}  // namespace

Field step(const Field& u, double dt, const SolverConfig& cfg) {
  if (!(dt != 0.0)) fail(Status::invalid_argument, "dt must be nonzero");
  Field out = u;
  nonlinear_half_step(out, dt);
  linear_step(out, dt, cfg.dealias);
  nonlinear_half_step(out, dt);
  out.time = u.time + dt;
  if (!all_finite(out))
    fail(Status::non_finite, "non-finite sample after step; under-resolved");
  return out;
}

Trajectory run(const Field& u0, const SolverConfig& cfg) {
  if (!all_finite(u0)) fail(Status::non_finite, "non-finite initial data");
  // ||grad Q|| = sqrt(d/2) ||Q||; constants only steer step-size control
  const double mass_q = u0.grid.d == 1 ? 2.7206990463513268
                                       : 11.700896422616239;
  const double grad_q_l2 = std::sqrt(u0.grid.d / 2.0) * std::sqrt(mass_q);

  Trajectory traj;
  Field u = u0;
  double t = u0.time;
  LedgerRow row0 = make_ledger_row(u, t, cfg.dt0);
  const double scale_energy =
      std::max({std::abs(row0.energy), 0.5 * row0.grad_l2 * row0.grad_l2,
                1e-12});
  traj.ledger.push_back(row0);
  traj.snapshots.push_back(u);

  const double h = u.grid.h(0);
  std::uint64_t step_count = 0;
  while (t < cfg.t_end - 1e-14) {
    double dt = cfg.dt0;
    if (cfg.cfl_blowup > 0.0) {
      const double lam = cfg.scale_estimate
                             ? cfg.scale_estimate(u, t)
                             : default_scale_estimate(u, grad_q_l2);
      if (lam < cfg.stop_scale_h * h) {
        traj.stop_reason = Status::resolution_exceeded;
        break;
      }
      dt = std::min(cfg.dt0, cfg.cfl_blowup * lam * lam);
    }
    dt = std::min(dt, cfg.t_end - t);
    u = step(u, dt, cfg);
    t = u.time;
    ++step_count;

    LedgerRow row = make_ledger_row(u, t, dt);
    traj.ledger.push_back(row);
    // drift relative to the current energy scale; the kinetic part grows
    // like (T-t)^{-2} in blow-up runs while E itself stays O(1)
    const double scale =
        std::max(scale_energy, 0.5 * row.grad_l2 * row.grad_l2);
    const double drift = std::abs(row.energy - row0.energy) / scale;
    if (drift > cfg.drift_tol)
      fail(Status::drift_exceeded,
           "relative energy drift " + format_double(drift) + " at t = " +
               format_double(t));
    if (step_count % static_cast<std::uint64_t>(cfg.snapshot_stride) == 0)
      traj.snapshots.push_back(u);
    if (step_count >= cfg.max_steps) {
      traj.stop_reason = Status::no_convergence;
      break;
    }
  }
  if (traj.snapshots.back().time != t) traj.snapshots.push_back(u);
  traj.t_final = t;
  return traj;
}

double estimate_blowup_time(
    const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 6)
    fail(Status::insufficient_data, "need at least 6 gradient-norm samples");
  const std::size_t n = series.size();
  const std::size_t lo = n - n / 3;
  std::vector<double> ts, inv;
  ts.reserve(n / 3);
  inv.reserve(n / 3);
  int increasing = 0, total = 0;
  for (std::size_t i = lo; i < n; ++i) {
    ts.push_back(series[i].first);
    inv.push_back(1.0 / series[i].second);
    if (i > lo) {
      ++total;
      if (series[i].second > series[i - 1].second) ++increasing;
    }
  }
  const double growth = series[n - 1].second / series[lo].second;
  if (growth < 1.1 || increasing < 0.9 * total)
    fail(Status::not_blowing_up,
         "gradient norm does not grow monotonically over the final third");
  const LineFit f = fit_line(ts, inv);
  if (f.b >= 0)
    fail(Status::not_blowing_up, "1/||grad u|| is not decreasing");
  return -f.a / f.b;
}

double estimate_blowup_time(const Trajectory& traj) {
  std::vector<std::pair<double, double>> series;
  series.reserve(traj.ledger.size());
  for (const auto& r : traj.ledger) series.emplace_back(r.t, r.grad_l2);
  return estimate_blowup_time(series);
}

VirialWeight quadratic_weight(const Grid& g) {
  const int n1 = g.d == 2 ? g.n[1] : 1;
  const std::size_t N = g.size();
  VirialWeight w;
  w.phi.resize(N);
  w.lap.assign(N, 2.0 * g.d);
  w.bilap.assign(N, 0.0);
  for (int a = 0; a < g.d; ++a) {
    w.grad[a].resize(N);
    for (int bb = 0; bb < g.d; ++bb)
      w.hess[a][bb].assign(N, a == bb ? 2.0 : 0.0);
  }
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
      const double x0 = g.coord(0, i0);
      const double x1 = g.d == 2 ? g.coord(1, i1) : 0.0;
      w.phi[id] = x0 * x0 + x1 * x1;
      w.grad[0][id] = 2.0 * x0;
      if (g.d == 2) w.grad[1][id] = 2.0 * x1;
    }
  }
  return w;
}

VirialCheckReport virial_second_derivative_check(const Trajectory& traj,
                                                 const VirialWeight& w) {
  // longest uniformly spaced prefix (runs append a final snapshot that
  // may break the stride)
  std::vector<Field> snaps;
  if (traj.snapshots.size() >= 2) {
    const double dt = traj.snapshots[1].time - traj.snapshots[0].time;
    snaps.push_back(traj.snapshots[0]);
    snaps.push_back(traj.snapshots[1]);
    for (std::size_t i = 2; i < traj.snapshots.size(); ++i) {
      if (std::abs(traj.snapshots[i].time - traj.snapshots[i - 1].time -
                   dt) > 1e-9 * dt)
        break;
      snaps.push_back(traj.snapshots[i]);
    }
  }
  if (snaps.size() < 3)
    fail(Status::insufficient_data,
         "need >= 3 uniformly spaced snapshots for the virial check");
  const double dt = snaps[1].time - snaps[0].time;

  const Grid& g = snaps[0].grid;
  const double cell = g.cell();
  const int d = g.d;
  const double pexp = 2.0 + 4.0 / d;

  auto weighted_mass = [&](const Field& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i)
      s += w.phi[i] * std::norm(v.values[i]);
    return s * cell;
  };
  auto morawetz = [&](const Field& v) {
    auto gr = gradient(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      cplx acc(0.0, 0.0);
      for (int a = 0; a < d; ++a)
        acc += w.grad[a][i] * gr[a].values[i];
      s += std::imag(std::conj(v.values[i]) * acc);
    }
    return s * cell;
  };
  auto second_rhs = [&](const Field& v) {
    auto gr = gradient(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      double hess_term = 0.0;
      for (int a = 0; a < d; ++a)
        for (int bb = 0; bb < d; ++bb)
          hess_term += w.hess[a][bb][i] *
                       std::real(gr[a].values[i] * std::conj(gr[bb].values[i]));
      const double av = std::abs(v.values[i]);
      s += 2.0 * hess_term -
           2.0 / (2.0 + d) * w.lap[i] * std::pow(av, pexp) -
           0.5 * w.bilap[i] * av * av;
    }
    return s * cell;
  };

  std::vector<double> m(snaps.size()), mor(snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    m[i] = weighted_mass(snaps[i]);
    mor[i] = morawetz(snaps[i]);
  }

  VirialCheckReport rep;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    VirialCheckRow row;
    row.t = snaps[i].time;
    row.lhs_first = (m[i + 1] - m[i - 1]) / (2.0 * dt);
    row.rhs_first = 2.0 * mor[i];
    row.lhs_second = (mor[i + 1] - mor[i - 1]) / (2.0 * dt);
    row.rhs_second = second_rhs(snaps[i]);
    rep.rows.push_back(row);
    rep.max_first =
        std::max(rep.max_first, std::abs(row.lhs_first - row.rhs_first));
    rep.max_second =
        std::max(rep.max_second, std::abs(row.lhs_second - row.rhs_second));
  }
  return rep;
}

}  // namespace nlslab
