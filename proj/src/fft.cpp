#include "nlslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "nlslab/errors.hpp"

namespace nlslab::fft {

namespace {

struct PlanKey {
  int n0, n1, sign;
  bool operator<(const PlanKey& o) const {
    return std::tie(n0, n1, sign) < std::tie(o.n0, o.n1, o.sign);
  }
};

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

// In-place plans created with FFTW_ESTIMATE are deterministic and can be
// re-executed on any buffer of the same shape via the new-array interface.
fftw_plan get_plan(const Grid& g, int sign, fftw_complex* buf) {
  PlanKey key{g.n[0], g.d == 2 ? g.n[1] : 1, sign};
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_plan p;
  if (g.d == 2)
    p = fftw_plan_dft_2d(g.n[0], g.n[1], buf, buf, sign,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  else
    p = fftw_plan_dft_1d(g.n[0], buf, buf, sign,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) fail(Status::internal, "fftw plan creation failed");
  cache.emplace(key, p);
  return p;
}

void execute(std::vector<cplx>& data, const Grid& g, int sign) {
  if (data.size() != g.size())
    fail(Status::shape_mismatch, "fft buffer does not match grid");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan p = get_plan(g, sign, buf);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace

void forward(std::vector<cplx>& data, const Grid& g) {
  execute(data, g, FFTW_FORWARD);
}

void inverse(std::vector<cplx>& data, const Grid& g) {
  execute(data, g, FFTW_BACKWARD);
  const double inv = 1.0 / static_cast<double>(g.size());
  for (auto& v : data) v *= inv;
}

std::vector<cplx> spectrum(const Field& u) {
  std::vector<cplx> hat = u.values;
  forward(hat, u.grid);
  return hat;
}

}  // namespace nlslab::fft
