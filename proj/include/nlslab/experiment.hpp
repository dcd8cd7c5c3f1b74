#ifndef NLSLAB_EXPERIMENT_HPP
#define NLSLAB_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nlslab {

// Parses, validates (strict unknown-key rejection), applies dotted-path
// overrides, runs the requested pipeline, and writes the artifact files
// plus resolved_config.json and manifest.json into out_dir.
// Returns the process exit status: 0 when every hard invariant passed.
int run_experiment_json(const std::string& config_json,
                        const std::filesystem::path& out_dir,
                        const std::vector<std::string>& overrides = {},
                        std::int64_t seed_override = -1);

// Per-slice distances between two snapshot directories in the chosen
// norm ("L2", "H1" or "Sigma"), paired by nearest time.
void compare_trajectories(const std::filesystem::path& dir_a,
                          const std::filesystem::path& dir_b,
                          const std::string& norm,
                          const std::filesystem::path& out_csv);

}  // namespace nlslab

#endif
