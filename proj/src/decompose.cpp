#include "nlslab/decompose.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlslab/field_ops.hpp"
#include "nlslab/numerics.hpp"

namespace nlslab {

namespace {

double project(const std::array<double, 2>& x, const std::array<double, 2>& v,
               int d) {
  return x[0] * v[0] + (d == 2 ? x[1] * v[1] : 0.0);
}

// transition profile: 1 for s <= 4 sigma, 0 for s >= 8 sigma
double cut_profile(double s, double sigma) {
  return 1.0 - smoothstep5((s - 4.0 * sigma) / (4.0 * sigma));
}

}  // namespace

Localization build_localization(
    const std::vector<std::array<double, 2>>& centers, const Grid& grid) {
  Localization loc;
  loc.grid = grid;
  loc.K = static_cast<int>(centers.size());
  const int d = grid.d;
  const std::size_t N = grid.size();
  if (loc.K < 1) fail(Status::invalid_argument, "need at least one center");
  if (loc.K == 1) {
    loc.phi.assign(1, std::vector<double>(N, 1.0));
    loc.order = {0};
    return loc;
  }

  // direction with distinct projections: axes first, then rotations
  std::vector<std::array<double, 2>> candidates;
  candidates.push_back({1.0, 0.0});
  if (d == 2) {
    candidates.push_back({0.0, 1.0});
    for (int j = 1; j < 16; ++j) {
      const double a = M_PI * j / 16.0;
      candidates.push_back({std::cos(a), std::sin(a)});
    }
  }
  bool found = false;
  for (const auto& v : candidates) {
    double min_gap = 1e300;
    std::vector<double> proj(loc.K);
    for (int k = 0; k < loc.K; ++k) proj[k] = project(centers[k], v, d);
    std::vector<double> sorted = proj;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k + 1 < loc.K; ++k)
      min_gap = std::min(min_gap, sorted[k + 1] - sorted[k]);
    if (min_gap > 1e-9) {
      loc.v1 = v;
      loc.sigma = min_gap / 12.0;
      found = true;
      break;
    }
  }
  if (!found)
    fail(Status::degenerate_centers,
         "no direction with distinct center projections found");

  loc.order.resize(loc.K);
  std::iota(loc.order.begin(), loc.order.end(), 0);
  std::sort(loc.order.begin(), loc.order.end(), [&](int a, int b) {
    return project(centers[a], loc.v1, d) < project(centers[b], loc.v1, d);
  });

  // telescoping partition along v1
  const int n1 = d == 2 ? grid.n[1] : 1;
  std::vector<std::vector<double>> phi_sorted(loc.K,
                                              std::vector<double>(N, 0.0));
  for (int i0 = 0; i0 < grid.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
      const std::array<double, 2> x = {grid.coord(0, i0),
                                       d == 2 ? grid.coord(1, i1) : 0.0};
      const double s = project(x, loc.v1, d);
      double prev = 0.0;  // 1 - P(s - p_{k-1}) accumulated
      for (int k = 0; k < loc.K; ++k) {
        double val;
        if (k == loc.K - 1) {
          val = 1.0 - prev;
        } else {
          const double pk =
              project(centers[loc.order[k]], loc.v1, d);
          const double cp = cut_profile(s - pk, loc.sigma);
          val = cp - prev;
          prev = cp;
        }
        phi_sorted[k][id] = val;
      }
    }
  }
  loc.phi.assign(loc.K, {});
  for (int k = 0; k < loc.K; ++k)
    loc.phi[loc.order[k]] = std::move(phi_sorted[k]);
  loc.grad_phi_bound = (15.0 / 8.0) / (4.0 * loc.sigma);
  return loc;
}

VirialWeight localization_virial_weight(
    const std::vector<std::array<double, 2>>& centers, const Grid& grid,
    int k) {
  Localization loc = build_localization(centers, grid);
  const int d = grid.d;
  const int n1 = d == 2 ? grid.n[1] : 1;
  const std::size_t N = grid.size();
  VirialWeight w;
  w.phi.assign(N, 0.0);
  w.lap.assign(N, 0.0);
  w.bilap.assign(N, 0.0);
  for (int a = 0; a < d; ++a) {
    w.grad[a].assign(N, 0.0);
    for (int b = 0; b < d; ++b) w.hess[a][b].assign(N, 0.0);
  }
  const double width = 4.0 * loc.sigma;
  // derivative of the profile of Phi_k along v1 (telescoped cutoffs)
  auto prof = [&](double s, int order, int kk) {
    auto one = [&](double sc, int der) {
      const double t = (sc - 4.0 * loc.sigma) / width;
      const double sgn = -1.0;
      switch (der) {
        case 0: return 1.0 - smoothstep5(t);
        case 1: return sgn * smoothstep5_deriv(t) / width;
        case 2: return sgn * smoothstep5_d2(t) / (width * width);
        case 3: return sgn * smoothstep5_d3(t) / (width * width * width);
        default:
          return sgn * smoothstep5_d4(t) / (width * width * width * width);
      }
    };
    // position of kk in the sorted order
    int pos = 0;
    for (int i = 0; i < loc.K; ++i)
      if (loc.order[i] == kk) pos = i;
    const auto& c = centers;
    double val = 0.0;
    if (pos == loc.K - 1) {
      const double pk = project(c[loc.order[pos - 1]], loc.v1, d);
      val = (order == 0 ? 1.0 : 0.0) - one(s - pk, order);
    } else if (pos == 0) {
      const double pk = project(c[loc.order[0]], loc.v1, d);
      val = one(s - pk, order);
    } else {
      const double pk = project(c[loc.order[pos]], loc.v1, d);
      const double pm = project(c[loc.order[pos - 1]], loc.v1, d);
      val = one(s - pk, order) - one(s - pm, order);
    }
    return val;
  };
  for (int i0 = 0; i0 < grid.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t id = static_cast<std::size_t>(i0) * n1 + i1;
      const std::array<double, 2> x = {grid.coord(0, i0),
                                       d == 2 ? grid.coord(1, i1) : 0.0};
      const double s = project(x, loc.v1, d);
      w.phi[id] = prof(s, 0, k);
      const double p1 = prof(s, 1, k);
      const double p2 = prof(s, 2, k);
      const double p4 = prof(s, 4, k);
      for (int a = 0; a < d; ++a) {
        w.grad[a][id] = p1 * loc.v1[a];
        for (int b = 0; b < d; ++b)
          w.hess[a][b][id] = p2 * loc.v1[a] * loc.v1[b];
      }
      w.lap[id] = p2;    // |v1| = 1
      w.bilap[id] = p4;
    }
  }
  return w;
}

namespace {

// Per-bubble orthogonality functionals against the remainder.
//   f1 = lambda^{-2} Re int |x-a|^2 U_k conj(R)
//   f2_i = lambda^{-1} Re int (x_i-a_i) U_k conj(R)
//   f3_i = lambda Im int d_i U_k conj(R)
//   f4 = Im int Lam_k U_k conj(R)
//   f5 = Im int rho_k conj(R)
void bubble_conditions(const ModParams::Bubble& b, const Field& R,
                       const GroundState& gs, double* out) {
  const Grid& g = R.grid;
  const int d = g.d;
  const int n1 = d == 2 ? g.n[1] : 1;
  const double amp = std::pow(b.lambda, -0.5 * d);
  const int m = 3 + 2 * d;
  for (int i = 0; i < m; ++i) out[i] = 0.0;
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const cplx Rc = std::conj(R.values[R.idx(i0, i1)]);
      if (Rc == cplx(0.0, 0.0)) continue;
      double z[2] = {g.coord(0, i0) - b.alpha[0],
                     d == 2 ? g.coord(1, i1) - b.alpha[1] : 0.0};
      double y[2] = {z[0] / b.lambda, z[1] / b.lambda};
      const double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
      const double q = gs.Q(r);
      const double qp = gs.Qprime(r);
      const double rho = gs.rho(r);
      const double y2 = r * r;
      const double phase = b.beta[0] * y[0] + b.beta[1] * y[1] -
                           0.25 * b.gamma * y2 + b.theta;
      const cplx e = amp * std::polar(1.0, phase);
      const cplx U = q * e;
      const double z2 = z[0] * z[0] + z[1] * z[1];
      int idx = 0;
      out[idx++] += std::real(z2 * U * Rc);
      for (int a = 0; a < d; ++a) out[idx++] += std::real(z[a] * U * Rc);
      const double inv_r = r > 1e-14 ? 1.0 / r : 0.0;
      for (int a = 0; a < d; ++a) {
        const cplx dU =
            e *
            (qp * y[a] * inv_r +
             q * cplx(0.0, b.beta[a] - 0.5 * b.gamma * y[a])) /
            b.lambda;
        out[idx++] += std::imag(dU * Rc);
      }
      const double bdoty = b.beta[0] * y[0] + b.beta[1] * y[1];
      const cplx lamU =
          e * (0.5 * d * q + r * qp +
               q * cplx(0.0, bdoty - 0.5 * b.gamma * y2));
      out[idx++] += std::imag(lamU * Rc);
      out[idx] += std::imag(rho * e * Rc);
    }
  }
  const double cell = g.cell();
  int idx = 0;
  const double l = b.lambda;
  out[idx++] *= cell / (l * l);
  for (int a = 0; a < d; ++a) out[idx++] *= cell / l;
  for (int a = 0; a < d; ++a) out[idx++] *= cell * l;
  out[idx++] *= cell;
  out[idx] *= cell;
}

struct TildeMap {
  const ProfileSpec& spec;
  double L;

  ModParams to_raw(const Eigen::VectorXd& tilde, double t) const {
    ModParams p;
    p.t = t;
    const int K = spec.K;
    const int m = static_cast<int>(tilde.size()) / K;
    const int dim = (m - 3) / 2;
    for (int k = 0; k < K; ++k) {
      const auto& b = spec.bubbles[k];
      const double wl = b.omega * L;
      ModParams::Bubble out;
      int j = k * m;
      out.lambda = tilde(j++) * wl;
      for (int a = 0; a < dim; ++a) out.alpha[a] = b.center[a] + tilde(j++) * wl;
      for (int a = 0; a < dim; ++a) out.beta[a] = tilde(j++);
      out.gamma = tilde(j++) + b.omega * b.omega * L;
      out.theta = tilde(j++) + 1.0 / (b.omega * b.omega * L) + b.vartheta;
      p.bubbles.push_back(out);
    }
    return p;
  }

  Eigen::VectorXd to_tilde(const ModParams& p, int dim) const {
    const int K = spec.K;
    const int m = 3 + 2 * dim;
    Eigen::VectorXd tilde(K * m);
    for (int k = 0; k < K; ++k) {
      const auto& b = spec.bubbles[k];
      const auto& in = p.bubbles[k];
      const double wl = b.omega * L;
      int j = k * m;
      tilde(j++) = in.lambda / wl;
      for (int a = 0; a < dim; ++a) tilde(j++) = (in.alpha[a] - b.center[a]) / wl;
      for (int a = 0; a < dim; ++a) tilde(j++) = in.beta[a];
      tilde(j++) = in.gamma - b.omega * b.omega * L;
      tilde(j++) = in.theta - 1.0 / (b.omega * b.omega * L) - b.vartheta;
    }
    return tilde;
  }
};

Eigen::VectorXd conditions(const Field& v, const ModParams& p,
                           const GroundState& gs) {
  const int d = v.grid.d;
  const int m = 3 + 2 * d;
  const int K = static_cast<int>(p.bubbles.size());
  Field U = make_U(gs, p, v.grid);
  Field R(v.grid, v.time);
  for (std::size_t i = 0; i < v.values.size(); ++i)
    R.values[i] = v.values[i] - U.values[i];
  Eigen::VectorXd F(K * m);
  std::vector<double> buf(m);
  for (int k = 0; k < K; ++k) {
    bubble_conditions(p.bubbles[k], R, gs, buf.data());
    for (int i = 0; i < m; ++i) F(k * m + i) = buf[i];
  }
  return F;
}

}  // namespace

std::vector<double> orthogonality_residuals(const Field& v,
                                            const ModParams& p,
                                            const GroundState& gs) {
  Eigen::VectorXd F = conditions(v, p, gs);
  return std::vector<double>(F.data(), F.data() + F.size());
}

Decomposition decompose(const Field& v, const ModParams& guess,
                        const ProfileSpec& spec, const GroundState& gs,
                        const Localization& loc,
                        const DecomposeOptions& opts) {
  if (spec.frame != ProfileSpec::Frame::blowup)
    fail(Status::invalid_argument, "decompose works in the blow-up frame");
  const int d = v.grid.d;
  const int K = spec.K;
  const int m = 3 + 2 * d;
  const double L = spec.T - v.time;
  if (!(L > 0)) fail(Status::invalid_argument, "snapshot time at or past T");
  if (static_cast<int>(guess.bubbles.size()) != K)
    fail(Status::invalid_argument, "guess bubble count mismatch");
  if (loc.K != K) fail(Status::invalid_argument, "localization bubble count mismatch");

  TildeMap map{spec, L};
  Eigen::VectorXd tilde = map.to_tilde(guess, d);
  const int dim = K * m;

  int iters = 0;
  double residual = 0.0;
  Eigen::VectorXd F = conditions(v, map.to_raw(tilde, v.time), gs);
  residual = F.cwiseAbs().maxCoeff();
  while (residual >= opts.ortho_tol) {
    if (iters >= opts.max_iters)
      fail(Status::no_convergence,
           "orthogonality residual " + format_double(residual) +
               " after max Newton iterations");
    Eigen::MatrixXd J(dim, dim);
    for (int j = 0; j < dim; ++j) {
      Eigen::VectorXd pert = tilde;
      const double step = opts.fd_step * std::max(1.0, std::abs(tilde(j)));
      pert(j) += step;
      Eigen::VectorXd Fp = conditions(v, map.to_raw(pert, v.time), gs);
      J.col(j) = (Fp - F) / step;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const double rc = lu.rcond();
    if (!(rc > 1e-13))
      fail(Status::singular_system,
           "Jacobian condition estimate " + format_double(rc) +
               "; bubbles merging or guess outside the basin");
    tilde += lu.solve(-F);
    ++iters;
    F = conditions(v, map.to_raw(tilde, v.time), gs);
    residual = F.cwiseAbs().maxCoeff();
  }

  Decomposition dec;
  dec.params = map.to_raw(tilde, v.time);
  dec.newton_iters = iters;
  dec.residual = residual;
  Field U = make_U(gs, dec.params, v.grid);
  dec.remainder = Field(v.grid, v.time);
  for (std::size_t i = 0; i < v.values.size(); ++i)
    dec.remainder.values[i] = v.values[i] - U.values[i];
  dec.localized.reserve(K);
  for (int k = 0; k < K; ++k) {
    Field rk(v.grid, v.time);
    for (std::size_t i = 0; i < rk.values.size(); ++i)
      rk.values[i] = dec.remainder.values[i] * loc.phi[k][i];
    dec.localized.push_back(std::move(rk));
  }
  return dec;
}

std::vector<double> localized_mass(const Decomposition& dec,
                                   const GroundState& gs,
                                   const Localization& loc) {
  const int K = static_cast<int>(dec.params.bubbles.size());
  std::vector<double> out(K, 0.0);
  const double cell = dec.remainder.grid.cell();
  for (int k = 0; k < K; ++k) {
    Field Uk = make_U_bubble(gs, dec.params.bubbles[k], dec.remainder.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < Uk.values.size(); ++i) {
      s += 2.0 * std::real(dec.localized[k].values[i] *
                           std::conj(Uk.values[i])) +
           std::norm(dec.remainder.values[i]) * loc.phi[k][i];
    }
    out[k] = s * cell;
  }
  return out;
}

namespace {
double vec_abs(const std::array<double, 2>& v, int d) {
  return std::sqrt(v[0] * v[0] + (d == 2 ? v[1] * v[1] : 0.0));
}
}  // namespace

ModulationSeries modulation_residuals(const std::vector<ModParams>& track) {
  const int N = static_cast<int>(track.size());
  if (N < 3)
    fail(Status::insufficient_data, "need >= 3 uniformly spaced slices");
  const double dt = track[1].t - track[0].t;
  for (int i = 1; i < N; ++i)
    if (std::abs(track[i].t - track[i - 1].t - dt) > 1e-9 * std::abs(dt))
      fail(Status::invalid_argument, "parameter slices not uniformly spaced");
  const int K = static_cast<int>(track[0].bubbles.size());

  ModulationSeries out;
  out.t.resize(N);
  out.mod.assign(N, 0.0);
  out.mod_k.assign(N, std::vector<double>(K, 0.0));
  out.dots.resize(N);

  auto get = [&](int i, int k) -> const ModParams::Bubble& {
    return track[i].bubbles[k];
  };
  // detect the bubble dimension from the grid-independent content: treat
  // second components as active only if any are nonzero
  int d = 1;
  for (const auto& p : track)
    for (const auto& b : p.bubbles)
      if (b.alpha[1] != 0.0 || b.beta[1] != 0.0) d = 2;

  for (int i = 0; i < N; ++i) {
    out.t[i] = track[i].t;
    ModParams dot;
    dot.t = track[i].t;
    for (int k = 0; k < K; ++k) {
      auto D = [&](auto proj) {
        if (i == 0)
          return (-3.0 * proj(get(0, k)) + 4.0 * proj(get(1, k)) -
                  proj(get(2, k))) /
                 (2.0 * dt);
        if (i == N - 1)
          return (3.0 * proj(get(N - 1, k)) - 4.0 * proj(get(N - 2, k)) +
                  proj(get(N - 3, k))) /
                 (2.0 * dt);
        return (proj(get(i + 1, k)) - proj(get(i - 1, k))) / (2.0 * dt);
      };
      ModParams::Bubble bd;
      bd.lambda = D([](const ModParams::Bubble& b) { return b.lambda; });
      bd.alpha[0] = D([](const ModParams::Bubble& b) { return b.alpha[0]; });
      bd.alpha[1] = D([](const ModParams::Bubble& b) { return b.alpha[1]; });
      bd.beta[0] = D([](const ModParams::Bubble& b) { return b.beta[0]; });
      bd.beta[1] = D([](const ModParams::Bubble& b) { return b.beta[1]; });
      bd.gamma = D([](const ModParams::Bubble& b) { return b.gamma; });
      bd.theta = D([](const ModParams::Bubble& b) { return b.theta; });
      dot.bubbles.push_back(bd);

      const auto& b = get(i, k);
      const double l = b.lambda;
      const std::array<double, 2> t_alpha = {
          l * bd.alpha[0] - 2.0 * b.beta[0],
          l * bd.alpha[1] - 2.0 * b.beta[1]};
      const std::array<double, 2> t_beta = {
          l * l * bd.beta[0] + b.gamma * b.beta[0],
          l * l * bd.beta[1] + b.gamma * b.beta[1]};
      const double b2 =
          b.beta[0] * b.beta[0] + (d == 2 ? b.beta[1] * b.beta[1] : 0.0);
      const double mk = std::abs(l * bd.lambda + b.gamma) +
                        std::abs(l * l * bd.gamma + b.gamma * b.gamma) +
                        vec_abs(t_alpha, d) + vec_abs(t_beta, d) +
                        std::abs(l * l * bd.theta - 1.0 - b2);
      out.mod_k[i][k] = mk;
      out.mod[i] += mk;
    }
    out.dots[i] = dot;
  }
  return out;
}

RemainderScalars remainder_scalars(const Decomposition& dec,
                                   const ProfileSpec& spec, double T,
                                   std::optional<Grid> qframe) {
  RemainderScalars out;
  const Field& R = dec.remainder;
  const double tau = T - dec.params.t;
  out.D = l2_norm(R) + tau * std::sqrt(grad_l2_sq(R));
  const int d = R.grid.d;
  for (std::size_t k = 0; k < dec.params.bubbles.size(); ++k) {
    const auto& b = dec.params.bubbles[k];
    std::array<double, 2> dx = {b.alpha[0] - spec.bubbles[k].center[0],
                                b.alpha[1] - spec.bubbles[k].center[1]};
    out.P += std::abs(b.lambda) + vec_abs(dx, d) + vec_abs(b.beta, d) +
             std::abs(b.gamma);
  }
  // renormalized remainders eps_k(y) = lambda^{d/2} R_k(alpha+lambda y) e^{-i theta}
  for (std::size_t k = 0; k < dec.params.bubbles.size(); ++k) {
    const auto& b = dec.params.bubbles[k];
    Grid target;
    if (qframe) {
      target = *qframe;
    } else {
      // exactly mapped source grid: y = (x - alpha)/lambda
      target = R.grid;
      for (int a = 0; a < d; ++a) {
        target.box[a] = R.grid.box[a] / b.lambda;
        target.origin[a] = (R.grid.origin[a] - b.alpha[a]) / b.lambda;
      }
    }
    Field eps = resample_affine(dec.localized[k], target,
                                {b.lambda, b.lambda},
                                {b.alpha[0], b.alpha[1]});
    const cplx factor =
        std::pow(b.lambda, 0.5 * d) * std::polar(1.0, -b.theta);
    for (auto& v : eps.values) v *= factor;
    eps.time = dec.params.t;
    out.eps.push_back(std::move(eps));
  }
  return out;
}

ProfileResidual profile_residual(const ModParams& p, const ModParams& pdot,
                                 const GroundState& gs, const Grid& grid) {
  const int d = grid.d;
  const int n1 = d == 2 ? grid.n[1] : 1;
  ProfileResidual out;
  out.eta = Field(grid, p.t);
  for (std::size_t k = 0; k < p.bubbles.size(); ++k) {
    const auto& b = p.bubbles[k];
    const auto& bd = pdot.bubbles[k];
    const double l = b.lambda;
    const double b2 =
        b.beta[0] * b.beta[0] + (d == 2 ? b.beta[1] * b.beta[1] : 0.0);
    const double c_theta = l * l * bd.theta - 1.0 - b2;
    const double c_gamma = l * l * bd.gamma + b.gamma * b.gamma;
    const double c_lambda = l * bd.lambda + b.gamma;
    const std::array<double, 2> c_beta = {
        l * l * bd.beta[0] + b.gamma * b.beta[0],
        l * l * bd.beta[1] + b.gamma * b.beta[1]};
    const std::array<double, 2> c_alpha = {l * bd.alpha[0] - 2.0 * b.beta[0],
                                           l * bd.alpha[1] - 2.0 * b.beta[1]};
    const double pref = std::pow(l, -2.0 - 0.5 * d);
    for (int i0 = 0; i0 < grid.n[0]; ++i0) {
      for (int i1 = 0; i1 < n1; ++i1) {
        double y[2] = {(grid.coord(0, i0) - b.alpha[0]) / l,
                       d == 2 ? (grid.coord(1, i1) - b.alpha[1]) / l : 0.0};
        const double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
        const double q = gs.Q(r);
        const double qp = gs.Qprime(r);
        const double y2 = r * r;
        const double bdoty = b.beta[0] * y[0] + b.beta[1] * y[1];
        const cplx e = std::polar(1.0, bdoty - 0.25 * b.gamma * y2 + b.theta);
        const double inv_r = r > 1e-14 ? 1.0 / r : 0.0;
        cplx acc = -c_theta * q;
        acc -= (c_beta[0] * y[0] + c_beta[1] * y[1]) * q;
        acc += 0.25 * c_gamma * y2 * q;
        for (int a = 0; a < d; ++a) {
          const cplx dq = qp * y[a] * inv_r +
                          q * cplx(0.0, b.beta[a] - 0.5 * b.gamma * y[a]);
          acc -= cplx(0.0, c_alpha[a]) * dq;
        }
        const cplx lam = 0.5 * d * q + r * qp +
                         q * cplx(0.0, bdoty - 0.5 * b.gamma * y2);
        acc -= cplx(0.0, c_lambda) * lam;
        out.eta.values[out.eta.idx(i0, i1)] += pref * e * acc;
      }
    }
  }
  out.l2 = l2_norm(out.eta);
  out.grad_l2 = std::sqrt(grad_l2_sq(out.eta));
  return out;
}

}  // namespace nlslab
