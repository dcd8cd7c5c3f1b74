#ifndef NLSLAB_IO_HPP
#define NLSLAB_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "nlslab/evolve.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab::io {

// Field snapshots: flat little-endian binary, header then interleaved
// re/im doubles in row-major order.
void write_field(const Field& u, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);
void write_field_csv(const Field& u, const std::filesystem::path& path);

// Radial profile tables: text header (d, r_max, n, tol) then rows of
// r, Q(r)[, rho(r)].
void write_profile_table(const GroundState& gs, double tol,
                         const std::filesystem::path& path);

// Conservation ledger: t, mass, energy, momentum_x[, momentum_y], dt.
void write_ledger_csv(const std::vector<LedgerRow>& ledger, int d,
                      const std::filesystem::path& path);

struct DiagnosticsRecord {
  double t = 0.0;
  double D = 0.0, P = 0.0, E = 0.0, Mod = 0.0;
  std::vector<double> mod_k, M_k;
  ModParams params;
  double ortho_residual = 0.0;
  int newton_iters = 0;
};

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& recs, int d,
                           const std::filesystem::path& path);

std::string file_checksum_hex(const std::filesystem::path& path);

// manifest.json: per-file FNV-1a checksums plus the library version.
void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::string>& files);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nlslab::io

#endif
