#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace mamimo {

enum class Precoder { MR, MMMSE };

std::string to_string(Precoder p);
Precoder precoder_from_string(const std::string& s);

/// Multi-cell network geometry and physical parameters. Cells form a square
/// grid of side sqrt(cells), each cell a square of cell_side_m meters with
/// the BS at its center. Powers are in mW throughout.
struct NetworkConfig {
  int cells = 4;
  int ues_per_cell = 5;
  int antennas = 32;
  double cell_side_m = 250.0;
  double p_max_dl_mw = 500.0;
  double noise_dbm = -94.0;
  double bandwidth_hz = 2.0e7;  // informational only
  Precoder precoder = Precoder::MR;
  int mc_realizations = 100;
  double shadow_std_db = 7.0;
  double min_dist_m = 10.0;
  std::uint64_t seed = 1;

  int grid_side() const {
    int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells))));
    return s;
  }
  /// Noise power in linear mW scale: 10^(noise_dbm/10).
  double noise_mw() const { return std::pow(10.0, noise_dbm / 10.0); }
  int total_ues() const { return cells * ues_per_cell; }
  int input_dim() const { return 2 * total_ues(); }

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

void to_json(nlohmann::json& j, const NetworkConfig& c);
void from_json(const nlohmann::json& j, NetworkConfig& c);

}  // namespace mamimo
