#include "mamimo/config.hpp"

namespace mamimo {

std::string to_string(Precoder p) {
  return p == Precoder::MR ? "MR" : "MMMSE";
}

Precoder precoder_from_string(const std::string& s) {
  if (s == "MR" || s == "mr") return Precoder::MR;
  if (s == "MMMSE" || s == "mmmse") return Precoder::MMMSE;
  throw std::invalid_argument("unknown precoder: " + s);
}

void NetworkConfig::validate() const {
  if (cells < 1 || ues_per_cell < 1 || antennas < 1 || mc_realizations < 1)
    throw std::invalid_argument("cells, ues_per_cell, antennas, mc_realizations must be >= 1");
  if (cell_side_m <= 0.0) throw std::invalid_argument("cell_side_m must be > 0");
  if (p_max_dl_mw <= 0.0) throw std::invalid_argument("p_max_dl_mw must be > 0");
  int s = grid_side();
  if (s * s != cells) throw std::invalid_argument("cells must be a perfect square (square grid layout)");
  if (shadow_std_db < 0.0) throw std::invalid_argument("shadow_std_db must be >= 0");
  if (min_dist_m < 0.0) throw std::invalid_argument("min_dist_m must be >= 0");
}

void to_json(nlohmann::json& j, const NetworkConfig& c) {
  j = nlohmann::json{
      {"cells", c.cells},
      {"ues_per_cell", c.ues_per_cell},
      {"antennas", c.antennas},
      {"cell_side_m", c.cell_side_m},
      {"p_max_dl_mw", c.p_max_dl_mw},
      {"noise_dbm", c.noise_dbm},
      {"bandwidth_hz", c.bandwidth_hz},
      {"precoder", to_string(c.precoder)},
      {"mc_realizations", c.mc_realizations},
      {"shadow_std_db", c.shadow_std_db},
      {"min_dist_m", c.min_dist_m},
      {"seed", c.seed},
  };
}

void from_json(const nlohmann::json& j, NetworkConfig& c) {
  NetworkConfig d;
  c.cells = j.value("cells", d.cells);
  c.ues_per_cell = j.value("ues_per_cell", d.ues_per_cell);
  c.antennas = j.value("antennas", d.antennas);
  c.cell_side_m = j.value("cell_side_m", d.cell_side_m);
  c.p_max_dl_mw = j.value("p_max_dl_mw", d.p_max_dl_mw);
  c.noise_dbm = j.value("noise_dbm", d.noise_dbm);
  c.bandwidth_hz = j.value("bandwidth_hz", d.bandwidth_hz);
  c.precoder = precoder_from_string(j.value("precoder", to_string(d.precoder)));
  c.mc_realizations = j.value("mc_realizations", d.mc_realizations);
  c.shadow_std_db = j.value("shadow_std_db", d.shadow_std_db);
  c.min_dist_m = j.value("min_dist_m", d.min_dist_m);
  c.seed = j.value("seed", d.seed);
  c.validate();
}

}  // namespace mamimo
