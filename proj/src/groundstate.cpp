#include "nlslab/groundstate.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/field_ops.hpp"
#include "nlslab/numerics.hpp"

namespace nlslab {

double closed_form_q1(double x) {
  const double s = 1.0 / std::cosh(2.0 * x);
  return std::pow(3.0 * s * s, 0.25);
}

namespace {

double int_pow(double q, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= q;
  return r;
}

struct OdeRhs {
  int d;
  // Q' = P,  P' = Q - Q^{1+4/d} - (d-1)/r P  (limit (Q - Q^{1+4/d})/d at 0)
  void operator()(double r, double Q, double P, double& dQ, double& dP) const {
    const int pw = 1 + 4 / d;  // 5 (d=1) or 3 (d=2)
    const double src = Q - int_pow(Q, pw);
    dQ = P;
    if (r < 1e-14)
      dP = src / d;
    else
      dP = src - (d - 1) / r * P;
  }
};

enum class ShotOutcome { crossed_zero, turned_up, survived };

// Integrates from r=0 to r_max with RK4, optionally recording node
// values every `rec_every` substeps.  Returns outcome and event radius.
ShotOutcome shoot(int d, double a, double r_max, double hsub,
                  std::vector<double>* q_nodes, std::vector<double>* p_nodes,
                  int rec_every, double* event_r) {
  OdeRhs rhs{d};
  double r = 0.0, Q = a, P = 0.0;
  long steps = std::lround(r_max / hsub);
  if (q_nodes) {
    q_nodes->push_back(Q);
    p_nodes->push_back(P);
  }
  for (long i = 1; i <= steps; ++i) {
    double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    rhs(r, Q, P, k1q, k1p);
    rhs(r + hsub / 2, Q + hsub / 2 * k1q, P + hsub / 2 * k1p, k2q, k2p);
    rhs(r + hsub / 2, Q + hsub / 2 * k2q, P + hsub / 2 * k2p, k3q, k3p);
    rhs(r + hsub, Q + hsub * k3q, P + hsub * k3p, k4q, k4p);
    Q += hsub / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    P += hsub / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    r = i * hsub;
    if (q_nodes && i % rec_every == 0) {
      q_nodes->push_back(Q);
      p_nodes->push_back(P);
    }
    if (Q <= 0.0) {
      if (event_r) *event_r = r;
      return ShotOutcome::crossed_zero;
    }
    if (P > 0.0 && r > 1.0) {
      if (event_r) *event_r = r;
      return ShotOutcome::turned_up;
    }
  }
  return ShotOutcome::survived;
}

}  // namespace

GroundStateSolve solve_ground_state_full(int d, double r_max, int n,
                                         double tol) {
  if (d != 1 && d != 2) fail(Status::invalid_argument, "d must be 1 or 2");
  if (r_max < 15.0) fail(Status::invalid_argument, "r_max must be >= 15");
  if (n < 512) fail(Status::invalid_argument, "radial sample count too small");
  if (tol <= 0) fail(Status::invalid_argument, "tol must be positive");

  const double h = r_max / (n - 1);

  // bisection on a = Q(0); crossing zero means a too large
  double lo, hi;
  if (d == 1) {
    lo = 1.1;
    hi = 1.5;
  } else {
    lo = 2.0;
    hi = 2.4;
  }
  // Bisection must run with the same integrator step as the final pass:
  // a coarse-step a* is biased for the fine integrator and the mismatch
  // grows like e^r into the tail.
  const int sub = std::max(1, static_cast<int>(std::ceil(h / 2e-4)));
  const int sub_coarse = std::max(1, static_cast<int>(std::ceil(h / 1e-3)));
  const double h_coarse = h / sub_coarse;
  const double h_fine = h / sub;
  {
    double er;
    if (shoot(d, lo, r_max + 4.0, h_coarse, nullptr, nullptr, 1, &er) !=
        ShotOutcome::turned_up)
      fail(Status::no_convergence, "lower shooting bracket not on the growing side");
    if (shoot(d, hi, r_max + 4.0, h_coarse, nullptr, nullptr, 1, &er) !=
        ShotOutcome::crossed_zero)
      fail(Status::no_convergence, "upper shooting bracket not on the crossing side");
  }
  for (int it = 0; it < 40 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const ShotOutcome s =
        shoot(d, mid, r_max + 4.0, h_coarse, nullptr, nullptr, 1, nullptr);
    if (s == ShotOutcome::crossed_zero)
      hi = mid;
    else
      lo = mid;
  }
  // widen the bracket a little; the fine integrator's a* can sit just
  // outside the coarse bracket
  {
    const double pad = 10.0 * (hi - lo) + 1e-12 * hi;
    lo -= pad;
    hi += pad;
    double er;
    if (shoot(d, lo, r_max + 4.0, h_fine, nullptr, nullptr, 1, &er) !=
        ShotOutcome::turned_up ||
        shoot(d, hi, r_max + 4.0, h_fine, nullptr, nullptr, 1, &er) !=
            ShotOutcome::crossed_zero)
      fail(Status::no_convergence, "fine-step bracket re-verification failed");
  }
  for (int it = 0; it < 90 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const ShotOutcome s =
        shoot(d, mid, r_max + 4.0, h_fine, nullptr, nullptr, 1, nullptr);
    if (s == ShotOutcome::crossed_zero)
      hi = mid;
    else
      lo = mid;
  }
  const double a = 0.5 * (lo + hi);
  std::vector<double> q, p;
  q.reserve(n);
  p.reserve(n);
  double event_r = 2.0 * r_max;
  shoot(d, a, r_max, h / sub, &q, &p, sub, &event_r);

  // if the unstable mode fired inside the domain, replace the samples
  // past the event with the locally fitted exponential tail
  if (static_cast<int>(q.size()) < n || event_r < r_max) {
    int ig = std::min<int>(static_cast<int>(q.size()) - 1,
                           static_cast<int>(event_r / h) - 20);
    if (ig < 8) fail(Status::no_convergence, "decaying solution lost too early; refine n or reduce r_max");
    const double kappa = -p[ig] / q[ig];
    q.resize(n);
    p.resize(n);
    for (int i = ig + 1; i < n; ++i) {
      q[i] = q[ig] * std::exp(-kappa * (i - ig) * h);
      p[i] = -kappa * q[i];
    }
  }

  GroundStateSolve out;
  out.q.d = d;
  out.q.r_max = r_max;
  out.q.n = n;
  out.q.values = std::move(q);
  out.qprime = std::move(p);
  out.q0 = a;

  // 6th-order FD residual of the ODE on the inner grid
  const int pw = 1 + 4 / d;
  double res = 0.0;
  const int i_hi = static_cast<int>(0.9 * (n - 1));
  for (int i = 0; i <= i_hi; ++i) {
    const auto& v = out.q.values;
    double lap;
    if (i == 0)
      lap = d * fd6_second(v, h, 0, +1);
    else
      lap = fd6_second(v, h, i, +1) +
            (d - 1) / out.q.r(i) * fd6_first(v, h, i, +1);
    res = std::max(res, std::abs(lap - v[i] + int_pow(v[i], pw)));
  }
  out.ode_residual = res;
  if (res > tol)
    fail(Status::no_convergence,
         "ground state ODE residual " + format_double(res) +
             " exceeds tol; r_max too small or n too coarse");
  if (out.q.values[n - 1] >= 1e-6)
    fail(Status::no_convergence, "profile does not reach 1e-6 at r_max");
  return out;
}

RadialProfile solve_ground_state(int d, double r_max, int n, double tol) {
  return solve_ground_state_full(d, r_max, n, tol).q;
}

namespace {

// 6th-order radial operator row applied to samples (parity-even at the
// origin, zero beyond the outer end).
double radial_l6(std::span<const double> g, double h, int i,
                 double first_coeff_num, std::span<const double> V) {
  double lap;
  if (i == 0)
    lap = (1.0 + first_coeff_num) * fd6_second(g, h, 0, +1);
  else
    lap = fd6_second(g, h, i, +1) +
          first_coeff_num / (i * h) * fd6_first(g, h, i, +1);
  return -lap + g[i] - V[i] * g[i];
}

}  // namespace

std::vector<double> apply_linearized(LinOp which, std::span<const double> g,
                                     const RadialProfile& Q, RadialForm form) {
  if (static_cast<int>(g.size()) != Q.n)
    fail(Status::shape_mismatch, "radial sample count differs from Q grid");
  const int d = Q.d;
  const double h = Q.h();
  const double vc = which == LinOp::plus ? 1.0 + 4.0 / d : 1.0;
  std::vector<double> V(Q.n);
  for (int i = 0; i < Q.n; ++i) V[i] = vc * int_pow(Q.values[i], 4 / d);
  std::vector<double> out(Q.n);
  if (form == RadialForm::scalar) {
    for (int i = 0; i < Q.n; ++i) out[i] = radial_l6(g, h, i, d - 1.0, V);
    return out;
  }
  // u = x_i g(r); the samples are the on-axis values w(r) = r g(r),
  // odd around the origin:
  //   (L u)|axis = -w'' - (d-1) w'/r + (d-1) w/r^2 + w - V w
  out[0] = 0.0;  // both sides vanish at r = 0 by parity
  for (int i = 1; i < Q.n; ++i) {
    const double r = i * h;
    const double wpp = fd6_second(g, h, i, -1);
    const double wp = fd6_first(g, h, i, -1);
    out[i] = -wpp - (d - 1.0) * (wp / r - g[i] / (r * r)) + g[i] -
             V[i] * g[i];
  }
  return out;
}

RadialProfile solve_rho(const RadialProfile& Q) {
  const int n = Q.n;
  const int d = Q.d;
  const double h = Q.h();
  std::vector<double> V(n);
  for (int i = 0; i < n; ++i)
    V[i] = (1.0 + 4.0 / d) * int_pow(Q.values[i], 4 / d);

  // L_+ rho = -r^2 Q, Neumann at 0 by parity, Dirichlet at r_max.
  // 6th-order stencil rows inside, 2nd-order rows near the outer edge.
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  Eigen::VectorXd rhs(n);
  auto add = [&](int row, int col, double w) {
    if (col >= n) return;  // zero extension beyond r_max
    trips.emplace_back(row, col < 0 ? -col : col, w);
  };
  static const double c2[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  static const double c1[4] = {0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
  for (int i = 0; i < n - 1; ++i) {
    const double r = Q.r(i);
    rhs(i) = -r * r * Q.values[i];
    if (i >= n - 4) {
      // 2nd-order rows in the far tail
      add(i, i, 2.0 / (h * h) + 1.0 - V[i]);
      add(i, i + 1, -1.0 / (h * h) - (d - 1) / r / (2.0 * h));
      add(i, i - 1, -1.0 / (h * h) + (d - 1) / r / (2.0 * h));
      continue;
    }
    if (i == 0) {
      add(i, i, -d * c2[0] / (h * h) + 1.0 - V[i]);
      for (int m = 1; m <= 3; ++m) {
        add(i, m, -d * c2[m] / (h * h));
        add(i, -m, -d * c2[m] / (h * h));
      }
      continue;
    }
    add(i, i, -c2[0] / (h * h) + 1.0 - V[i]);
    for (int m = 1; m <= 3; ++m) {
      add(i, i + m, -c2[m] / (h * h) - (d - 1) / r * c1[m] / h);
      add(i, i - m, -c2[m] / (h * h) + (d - 1) / r * c1[m] / h);
    }
  }
  trips.emplace_back(n - 1, n - 1, 1.0);
  rhs(n - 1) = 0.0;

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    fail(Status::singular_system, "discretized radial L_+ is singular; grid too coarse");
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    fail(Status::singular_system, "radial L_+ solve failed");

  RadialProfile rho;
  rho.d = d;
  rho.r_max = Q.r_max;
  rho.n = n;
  rho.values.assign(sol.data(), sol.data() + n);

  // residual of the defining equation with the 6th-order operator
  auto lr = apply_linearized(LinOp::plus, rho.values, Q);
  double res = 0.0;
  const int i_hi = static_cast<int>(0.8 * (n - 1));
  for (int i = 0; i <= i_hi; ++i) {
    const double r = Q.r(i);
    res = std::max(res, std::abs(lr[i] + r * r * Q.values[i]));
  }
  if (res > 1e-8)
    fail(Status::singular_system,
         "L_+ rho residual " + format_double(res) + " too large; grid too coarse");
  return rho;
}

TailFit fit_exponential_tail(const RadialProfile& p) {
  std::vector<double> xs, ys;
  for (int i = p.n / 2; i < p.n; ++i) {
    const double a = std::abs(p.values[i]);
    if (a > 1e-13) {
      xs.push_back(p.r(i));
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 8) fail(Status::insufficient_data, "tail has too few usable samples");
  const LineFit f = fit_line(xs, ys);
  return TailFit{f.a, -f.b, f.rms};
}

double radial_integral(std::span<const double> w, double h, int d) {
  if (d == 1) {
    return 2.0 * integrate_uniform(w, h);
  }
  std::vector<double> f(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) f[i] = w[i] * (i * h);
  return 2.0 * M_PI * integrate_uniform(f, h);
}

GroundState GroundState::compute(int d, double r_max, int n, double tol) {
  GroundState gs;
  gs.d_ = d;
  auto sol = solve_ground_state_full(d, r_max, n, tol);
  gs.q_ = std::move(sol.q);
  gs.qprime_ = std::move(sol.qprime);
  gs.q0_ = sol.q0;
  gs.ode_residual_ = sol.ode_residual;
  gs.rho_ = solve_rho(gs.q_);

  const double h = gs.q_.h();
  const int m = gs.q_.n;
  std::vector<double> w(m);
  auto& qv = gs.q_.values;
  for (int i = 0; i < m; ++i) w[i] = qv[i] * qv[i];
  gs.c_.massQ = radial_integral(w, h, d);
  for (int i = 0; i < m; ++i) w[i] = (i * h) * (i * h) * qv[i] * qv[i];
  gs.c_.xQ2 = radial_integral(w, h, d);
  for (int i = 0; i < m; ++i) w[i] = gs.qprime_[i] * gs.qprime_[i];
  gs.c_.gradQ2 = radial_integral(w, h, d);
  for (int i = 0; i < m; ++i)
    w[i] = gs.rho_.values[i] * (i * h) * (i * h) * qv[i];
  gs.c_.rho_xq = radial_integral(w, h, d);
  for (int i = 0; i < m; ++i) w[i] = int_pow(qv[i], 2 + 4 / d);
  gs.int_q_pow_ = radial_integral(w, h, d);
  for (int i = 0; i < m; ++i) {
    const double lam = 0.5 * d * qv[i] + (i * h) * gs.qprime_[i];
    w[i] = lam * lam;
  }
  gs.lambda_q2_ = radial_integral(w, h, d);
  gs.energyQ_ = 0.5 * gs.c_.gradQ2 - d / (2.0 * d + 4.0) * gs.int_q_pow_;

  // C^1 exponential continuation; fitted well inside the table end,
  // where the shooting tail is still accurate relative to Q itself
  const int ic = static_cast<int>((r_max - 2.0) / h);
  gs.ext_r_ = ic * h;
  gs.ext_q_ = qv[ic];
  gs.ext_kq_ = gs.ext_q_ > 0 ? -gs.qprime_[ic] / gs.ext_q_ : 1.0;
  gs.ext_rho_ = gs.rho_.values[ic];
  const double rho_slope = fd6_first(gs.rho_.values, h, ic, +1);
  gs.ext_krho_ = std::abs(gs.ext_rho_) > 1e-13
                     ? -rho_slope / gs.ext_rho_
                     : 1.0;
  if (gs.ext_krho_ < 0.1) gs.ext_krho_ = 1.0;
  return gs;
}

double GroundState::Q(double r) const {
  const double a = std::abs(r);
  if (a >= ext_r_) return ext_q_ * std::exp(-ext_kq_ * (a - ext_r_));
  return interp_uniform(q_.values, q_.h(), a, +1);
}

double GroundState::Qprime(double r) const {
  const double a = std::abs(r);
  if (a >= ext_r_) {
    const double v = -ext_kq_ * ext_q_ * std::exp(-ext_kq_ * (a - ext_r_));
    return r < 0 ? -v : v;
  }
  return interp_uniform(qprime_, q_.h(), r, -1);
}

double GroundState::rho(double r) const {
  const double a = std::abs(r);
  if (a >= ext_r_) return ext_rho_ * std::exp(-ext_krho_ * (a - ext_r_));
  return interp_uniform(rho_.values, rho_.h(), a, +1);
}

Field apply_linearized(LinOp which, const Field& f, const GroundState& gs) {
  const Grid& g = f.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  // -Lap f spectrally
  auto hat = fft::spectrum(f);
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      double k2 = g.wavenumber(0, i0) * g.wavenumber(0, i0);
      if (g.d == 2) k2 += g.wavenumber(1, i1) * g.wavenumber(1, i1);
      hat[f.idx(i0, i1)] *= k2;
    }
  }
  fft::inverse(hat, g);
  const double vc = which == LinOp::plus ? 1.0 + 4.0 / g.d : 1.0;
  Field out(g, f.time);
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      double r2 = g.coord(0, i0) * g.coord(0, i0);
      if (g.d == 2) r2 += g.coord(1, i1) * g.coord(1, i1);
      const double q = gs.Q(std::sqrt(r2));
      const double V = vc * int_pow(q, 4 / g.d);
      const std::size_t id = f.idx(i0, i1);
      out.values[id] = hat[id] + (1.0 - V) * f.values[id];
    }
  }
  return out;
}

namespace {

// Samples of the six unstable directions on a Cartesian grid centered
// at the origin.  Real-part set {Q, x_i Q, |x|^2 Q}, imaginary-part set
// {d_i Q, Lam Q, rho}.
struct UnstableDirections {
  std::vector<std::vector<double>> re_set, im_set;
};

UnstableDirections sample_directions(const Grid& g, const GroundState& gs) {
  const int n1 = g.d == 2 ? g.n[1] : 1;
  const std::size_t N = g.size();
  UnstableDirections dirs;
  dirs.re_set.assign(2 + g.d, std::vector<double>(N));
  dirs.im_set.assign(2 + g.d, std::vector<double>(N));
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
      double x[2] = {g.coord(0, i0), g.d == 2 ? g.coord(1, i1) : 0.0};
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
      const double q = gs.Q(r);
      const double qp = gs.Qprime(r);
      const double slope = r > 1e-12 ? qp / r : 0.0;
      dirs.re_set[0][id] = q;
      for (int a = 0; a < g.d; ++a) dirs.re_set[1 + a][id] = x[a] * q;
      dirs.re_set[1 + g.d][id] = r * r * q;
      for (int a = 0; a < g.d; ++a) dirs.im_set[a][id] = x[a] * slope;
      dirs.im_set[g.d][id] = 0.5 * g.d * q + r * qp;
      dirs.im_set[1 + g.d][id] = gs.rho(r);
    }
  }
  return dirs;
}

double dot(const std::vector<double>& a, const std::vector<double>& b,
           double cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * cell;
}

}  // namespace

double scal(const Field& f, const GroundState& gs) {
  const Grid& g = f.grid;
  auto dirs = sample_directions(g, gs);
  std::vector<double> re(f.values.size()), im(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    re[i] = f.values[i].real();
    im[i] = f.values[i].imag();
  }
  double s = 0.0;
  for (const auto& w : dirs.re_set) {
    const double v = dot(re, w, g.cell());
    s += v * v;
  }
  for (const auto& w : dirs.im_set) {
    const double v = dot(im, w, g.cell());
    s += v * v;
  }
  return s;
}

Field project_off_unstable(const Field& f, const GroundState& gs) {
  const Grid& g = f.grid;
  auto dirs = sample_directions(g, gs);
  std::vector<double> re(f.values.size()), im(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    re[i] = f.values[i].real();
    im[i] = f.values[i].imag();
  }
  auto orthogonalize = [&](std::vector<std::vector<double>>& set,
                           std::vector<double>& target) {
    // modified Gram-Schmidt on the direction set, then two projection
    // sweeps on the target
    for (std::size_t j = 0; j < set.size(); ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        const double c = dot(set[j], set[k], g.cell());
        for (std::size_t i = 0; i < set[j].size(); ++i)
          set[j][i] -= c * set[k][i];
      }
      const double nrm = std::sqrt(dot(set[j], set[j], g.cell()));
      for (auto& v : set[j]) v /= nrm;
    }
    for (int sweep = 0; sweep < 2; ++sweep)
      for (const auto& w : set) {
        const double c = dot(target, w, g.cell());
        for (std::size_t i = 0; i < target.size(); ++i) target[i] -= c * w[i];
      }
  };
  orthogonalize(dirs.re_set, re);
  orthogonalize(dirs.im_set, im);
  Field out(g, f.time);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = cplx(re[i], im[i]);
  return out;
}

}  // namespace nlslab
