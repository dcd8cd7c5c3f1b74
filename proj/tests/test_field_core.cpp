#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/field_ops.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/numerics.hpp"
#include "nlslab/profiles.hpp"
#include "oracles.hpp"

using namespace nlslab;

namespace {

const GroundState& gs1() {
  static GroundState gs = GroundState::compute(1);
  return gs;
}

Grid grid1(int n = 1024, double box = 40.0) {
  return Grid::line(n, box, -box / 2);
}

Field random_field(const Grid& g, std::uint64_t seed, int modes = 12) {
  Rng rng(seed);
  Field f(g);
  const int n1 = g.d == 2 ? g.n[1] : 1;
  for (int m0 = -modes; m0 <= modes; ++m0) {
    const cplx amp(rng.uniform(-1, 1), rng.uniform(-1, 1));
    for (int i0 = 0; i0 < g.n[0]; ++i0)
      for (int i1 = 0; i1 < n1; ++i1)
        f.values[f.idx(i0, i1)] +=
            amp / (1.0 + m0 * m0) *
            std::polar(1.0, 2 * M_PI * m0 * (g.coord(0, i0) - g.origin[0]) /
                                g.box[0]);
  }
  return f;
}

Field sampled_q1(const Grid& g) {
  Field f(g);
  for (int i = 0; i < g.n[0]; ++i) f.values[i] = oracle::q1(g.coord(0, i));
  return f;
}

}  // namespace

TEST_CASE("parseval identity on a random field") {
  const Grid g = grid1();
  Field f = random_field(g, 7);
  auto hat = fft::spectrum(f);
  double spec = 0.0;
  for (const auto& v : hat) spec += std::norm(v);
  spec *= g.cell() / g.size();
  CHECK(std::abs(spec - mass(f)) < 1e-12 * mass(f));
}

TEST_CASE("mass: zero field, solitary wave, two-bubble sum") {
  const Grid g = grid1();
  CHECK(mass(Field(g)) == 0.0);

  ProfileSpec spec;
  spec.frame = ProfileSpec::Frame::soliton;
  spec.K = 1;
  spec.bubbles = {{0.8, {0.3, 0.0}, 0.7}};
  Field w = make_W(gs1(), spec, 0, 0.4, g);
  CHECK(std::abs(mass(w) - oracle::kMassQ1) < 1e-8);

  ProfileSpec two;
  two.frame = ProfileSpec::Frame::blowup;
  two.K = 2;
  two.T = 1.0;
  two.bubbles = {{1.0, {-6.0, 0.0}, 0.0}, {0.9, {6.0, 0.0}, 1.0}};
  Field s = make_S_sum(gs1(), two, 0.4, g);
  CHECK(std::abs(mass(s) - 2.0 * oracle::kMassQ1) < 1e-6);
}

TEST_CASE("energy: ground state, boosted wave, blow-up profile") {
  const Grid g = grid1();
  ProfileSpec spec;
  spec.frame = ProfileSpec::Frame::soliton;
  spec.K = 1;
  spec.bubbles = {{1.0, {0.0, 0.0}, 0.0}};
  Field q = make_W(gs1(), spec, 0, 0.0, g);
  CHECK(std::abs(energy(q)) < 1e-8);

  spec.bubbles[0].center[0] = 0.6;  // speed v
  Field w = make_W(gs1(), spec, 0, 0.0, g);
  CHECK(std::abs(energy(w) - 0.36 / 8.0 * oracle::kMassQ1) < 1e-7);

  ProfileSpec bspec;
  bspec.frame = ProfileSpec::Frame::blowup;
  bspec.K = 1;
  bspec.T = 1.0;
  bspec.bubbles = {{1.2, {0.0, 0.0}, 0.3}};
  Field s = make_S(gs1(), bspec, 0, 0.5, g);
  CHECK(std::abs(energy(s) - 1.44 / 8.0 * oracle::kXQ2_1) < 1e-6);
}

TEST_CASE("momentum: real field, boosted wave, lattice Galilean shift") {
  const Grid g = grid1();
  Field q = sampled_q1(g);
  CHECK(std::abs(momentum(q)[0]) < 1e-13);

  ProfileSpec spec;
  spec.frame = ProfileSpec::Frame::soliton;
  spec.K = 1;
  spec.bubbles = {{1.0, {0.5, 0.0}, 0.0}};
  Field w = make_W(gs1(), spec, 0, 0.0, g);
  CHECK(std::abs(momentum(w)[0] - 0.25 * oracle::kMassQ1) < 1e-8);

  Field u = random_field(g, 3);
  const double beta = 2 * M_PI * 5 / g.box[0];
  Field shifted = u;
  for (int i = 0; i < g.n[0]; ++i)
    shifted.values[i] *= std::polar(1.0, beta * (g.coord(0, i) - g.origin[0]));
  CHECK(std::abs(momentum(shifted)[0] - momentum(u)[0] - beta * mass(u)) <
        1e-10 * (1.0 + std::abs(momentum(u)[0])));
}

TEST_CASE("sigma norm on Q and on a shrinking blow-up profile") {
  const Grid g = grid1();
  CHECK(sigma_norm(Field(g)).total == 0.0);

  Field q = sampled_q1(g);
  const SigmaNorm sn = sigma_norm(q);
  CHECK(std::abs(sn.h1 - std::sqrt(oracle::kMassQ1 + oracle::kGradQ2_1)) <
        1e-8);
  CHECK(std::abs(sn.weighted - std::sqrt(oracle::kXQ2_1)) < 1e-8);

  ProfileSpec bspec;
  bspec.frame = ProfileSpec::Frame::blowup;
  bspec.K = 1;
  bspec.T = 1.0;
  bspec.bubbles = {{0.9, {0.0, 0.0}, 0.0}};
  const double t = 0.4;
  Field s = make_S(gs1(), bspec, 0, t, g);
  const double lambda = 0.9 * (bspec.T - t);
  CHECK(std::abs(sigma_norm(s).weighted - lambda * std::sqrt(oracle::kXQ2_1)) <
        1e-8);
}

TEST_CASE("boundary mass guard fires for edge-centered data") {
  const Grid g = grid1();
  Field f(g);
  for (int i = 0; i < g.n[0]; ++i) {
    const double x = g.coord(0, i);
    f.values[i] = std::exp(-(x - 18.0) * (x - 18.0));
  }
  CHECK_THROWS_AS((void)sigma_norm(f), Error);
}

TEST_CASE("nonlinearity layers: exactness and real collapse") {
  const Grid g = grid1();
  Field U = random_field(g, 11);
  Field R = random_field(g, 12);
  for (auto& v : R.values) v *= 0.3;

  auto layers = nonlinearity_layers(U, R);
  double worst = 0.0;
  for (std::size_t i = 0; i < U.values.size(); ++i) {
    const cplx direct = nonlinearity(U.values[i] + R.values[i], 1);
    const cplx sum = layers.f_u.values[i] + layers.fprime_r.values[i] +
                     layers.fsecond_r2.values[i];
    worst = std::max(worst, std::abs(direct - sum));
  }
  CHECK(worst < 1e-13);

  auto zero = nonlinearity_layers(U, Field(g));
  CHECK(l2_norm(zero.fprime_r) == 0.0);
  CHECK(l2_norm(zero.fsecond_r2) == 0.0);

  // real inputs: f'(U).R = (1+4/d) U^{4/d} R
  Field Ur(g), Rr(g);
  for (int i = 0; i < g.n[0]; ++i) {
    Ur.values[i] = std::abs(U.values[i]);
    Rr.values[i] = std::abs(R.values[i]);
  }
  auto lr = nonlinearity_layers(Ur, Rr);
  worst = 0.0;
  for (int i = 0; i < g.n[0]; ++i) {
    const double u = Ur.values[i].real(), r = Rr.values[i].real();
    worst = std::max(worst,
                     std::abs(lr.fprime_r.values[i].real() -
                              5.0 * u * u * u * u * r));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("gagliardo-nirenberg ratio: exponent collapse and invariances") {
  const Grid g = grid1();
  Field q = sampled_q1(g);
  CHECK(gagliardo_nirenberg_ratio(q, 2.0) == 1.0);

  const double r0 = gagliardo_nirenberg_ratio(q, 6.0);
  Field q2 = sampled_q1(Grid::line(2048, 40.0, -20.0));
  CHECK(std::abs(gagliardo_nirenberg_ratio(q2, 6.0) - r0) < 1e-8);

  // L^2-critical rescaling u_l(x) = l^{-1/2} u(x/l)
  const double l = 2.0;
  const Grid gw = Grid::line(2048, 80.0, -40.0);
  Field ql(gw);
  for (int i = 0; i < gw.n[0]; ++i)
    ql.values[i] = std::pow(l, -0.5) * oracle::q1(gw.coord(0, i) / l);
  CHECK(std::abs(gagliardo_nirenberg_ratio(ql, 6.0) - r0) < 1e-10);

  CHECK_THROWS_AS((void)gagliardo_nirenberg_ratio(Field(g), 4.0), Error);
}

TEST_CASE("translation and phase invariance of the functionals") {
  const Grid g = grid1();
  Field u = random_field(g, 21);
  const double m0 = mass(u), p0 = momentum(u)[0], e0 = energy(u);

  Field shifted(g);
  const int shift = 137;
  for (int i = 0; i < g.n[0]; ++i)
    shifted.values[(i + shift) % g.n[0]] = u.values[i];
  CHECK(std::abs(mass(shifted) - m0) < 1e-12 * m0);
  CHECK(std::abs(momentum(shifted)[0] - p0) < 1e-12 * (1 + std::abs(p0)));

  Field rotated = u;
  for (auto& v : rotated.values) v *= std::polar(1.0, 1.234);
  CHECK(std::abs(energy(rotated) - e0) < 1e-12 * (1 + std::abs(e0)));
}

TEST_CASE("2d mass and energy of a centered ground state") {
  const GroundState gs2 = GroundState::compute(2);
  const Grid g = Grid::square(256, 30.0, -15.0);
  ProfileSpec spec;
  spec.frame = ProfileSpec::Frame::soliton;
  spec.K = 1;
  spec.bubbles = {{1.0, {0.0, 0.0}, 0.0}};
  Field q = make_W(gs2, spec, 0, 0.0, g);
  CHECK(std::abs(mass(q) - gs2.constants().massQ) < 1e-6);
  CHECK(std::abs(energy(q)) < 1e-6);
}
