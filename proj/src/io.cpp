#include "nlslab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "nlslab/numerics.hpp"

namespace nlslab::io {

namespace {
constexpr char kMagic[4] = {'N', 'L', 'S', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::ifstream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
}  // namespace

void write_field(const Field& u, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Status::io_error, "cannot open " + path.string());
  os.write(kMagic, 4);
  put_u32(os, kFormatVersion);
  put_u32(os, static_cast<std::uint32_t>(u.grid.d));
  put_u32(os, static_cast<std::uint32_t>(u.grid.n[0]));
  put_u32(os, static_cast<std::uint32_t>(u.grid.n[1]));
  put_f64(os, u.grid.box[0]);
  put_f64(os, u.grid.box[1]);
  put_f64(os, u.grid.origin[0]);
  put_f64(os, u.grid.origin[1]);
  put_f64(os, u.time);
  for (const auto& v : u.values) {
    put_f64(os, v.real());
    put_f64(os, v.imag());
  }
  if (!os) fail(Status::io_error, "short write to " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Status::io_error, "cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    fail(Status::io_error, "bad field file magic in " + path.string());
  if (get_u32(is) != kFormatVersion)
    fail(Status::io_error, "unsupported field format version");
  Grid g;
  g.d = static_cast<int>(get_u32(is));
  g.n[0] = static_cast<int>(get_u32(is));
  g.n[1] = static_cast<int>(get_u32(is));
  g.box[0] = get_f64(is);
  g.box[1] = get_f64(is);
  g.origin[0] = get_f64(is);
  g.origin[1] = get_f64(is);
  Field u;
  u.grid = g;
  u.time = get_f64(is);
  u.values.resize(g.size());
  for (auto& v : u.values) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    v = cplx(re, im);
  }
  if (!is) fail(Status::io_error, "short read from " + path.string());
  return u;
}

void write_field_csv(const Field& u, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) fail(Status::io_error, "cannot open " + path.string());
  const Grid& g = u.grid;
  const int n1 = g.d == 2 ? g.n[1] : 1;
  os << (g.d == 2 ? "x,y,re,im\n" : "x,re,im\n");
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const cplx v = u.values[u.idx(i0, i1)];
      os << format_double(g.coord(0, i0)) << ',';
      if (g.d == 2) os << format_double(g.coord(1, i1)) << ',';
      os << format_double(v.real()) << ',' << format_double(v.imag())
         << '\n';
    }
  }
}

void write_profile_table(const GroundState& gs, double tol,
                         const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) fail(Status::io_error, "cannot open " + path.string());
  const RadialProfile& q = gs.q_profile();
  os << "# d " << q.d << "\n# r_max " << format_double(q.r_max) << "\n# n "
     << q.n << "\n# tol " << format_double(tol) << "\n# ode_residual "
     << format_double(gs.ode_residual()) << "\n";
  os << "# r Q rho\n";
  for (int i = 0; i < q.n; ++i)
    os << format_double(q.r(i)) << ' ' << format_double(q.values[i]) << ' '
       << format_double(gs.rho_profile().values[i]) << '\n';
}

void write_ledger_csv(const std::vector<LedgerRow>& ledger, int d,
                      const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) fail(Status::io_error, "cannot open " + path.string());
  os << (d == 2 ? "t,mass,energy,momentum_x,momentum_y,dt\n"
                : "t,mass,energy,momentum_x,dt\n");
  for (const auto& r : ledger) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ','
       << format_double(r.energy) << ',' << format_double(r.mom_x);
    if (d == 2) os << ',' << format_double(r.mom_y);
    os << ',' << format_double(r.dt) << '\n';
  }
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& recs, int d,
                           const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) fail(Status::io_error, "cannot open " + path.string());
  if (recs.empty()) return;
  const int K = static_cast<int>(recs.front().M_k.size());
  os << "t,D,P,E,Mod";
  for (int k = 1; k <= K; ++k) os << ",Mod_" << k;
  for (int k = 1; k <= K; ++k) os << ",M_" << k;
  for (int k = 1; k <= K; ++k) os << ",lambda_" << k;
  for (int k = 1; k <= K; ++k) {
    os << ",alpha_" << k << "_x";
    if (d == 2) os << ",alpha_" << k << "_y";
  }
  for (int k = 1; k <= K; ++k) {
    os << ",beta_" << k << "_x";
    if (d == 2) os << ",beta_" << k << "_y";
  }
  for (int k = 1; k <= K; ++k) os << ",gamma_" << k;
  for (int k = 1; k <= K; ++k) os << ",theta_" << k;
  os << ",ortho_residual,newton_iters\n";
  for (const auto& r : recs) {
    os << format_double(r.t) << ',' << format_double(r.D) << ','
       << format_double(r.P) << ',' << format_double(r.E) << ','
       << format_double(r.Mod);
    for (int k = 0; k < K; ++k) os << ',' << format_double(r.mod_k[k]);
    for (int k = 0; k < K; ++k) os << ',' << format_double(r.M_k[k]);
    for (int k = 0; k < K; ++k)
      os << ',' << format_double(r.params.bubbles[k].lambda);
    for (int k = 0; k < K; ++k) {
      os << ',' << format_double(r.params.bubbles[k].alpha[0]);
      if (d == 2) os << ',' << format_double(r.params.bubbles[k].alpha[1]);
    }
    for (int k = 0; k < K; ++k) {
      os << ',' << format_double(r.params.bubbles[k].beta[0]);
      if (d == 2) os << ',' << format_double(r.params.bubbles[k].beta[1]);
    }
    for (int k = 0; k < K; ++k)
      os << ',' << format_double(r.params.bubbles[k].gamma);
    for (int k = 0; k < K; ++k)
      os << ',' << format_double(r.params.bubbles[k].theta);
    os << ',' << format_double(r.ortho_residual) << ',' << r.newton_iters
       << '\n';
  }
}

std::string file_checksum_hex(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Status::io_error, "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());
  char out[20];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(buf.data(), buf.size())));
  return out;
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::string>& files) {
  std::ofstream os(dir / "manifest.json");
  if (!os) fail(Status::io_error, "cannot open manifest");
  os << "{\n  \"version\": \"" << kVersion << "\",\n  \"checksums\": {\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    os << "    \"" << files[i] << "\": \""
       << file_checksum_hex(dir / files[i]) << "\"";
    os << (i + 1 < files.size() ? ",\n" : "\n");
  }
  os << "  }\n}\n";
}

}  // namespace nlslab::io
