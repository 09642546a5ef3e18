#pragma once

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamimo/config.hpp"
#include "mamimo/rng.hpp"

namespace mamimo {

/// Planar UE coordinates in meters, global frame. Row (j*K + k) holds UE k of
/// cell j. Each UE is confined to its own cell square.
struct UEPlacement {
  Eigen::MatrixX2d pos;  // (L*K) x 2
};

/// Large-scale channel coefficients (pathloss + shadowing), linear scale.
/// beta(l, j*K+k) is the gain between BS l and UE k of cell j.
struct LargeScale {
  Eigen::MatrixXd beta;  // L x (L*K)
};

/// One small-scale fading draw. h[l] is M x (L*K); column (j*K+k) is the
/// channel vector between BS l and UE k of cell j.
struct ChannelRealization {
  std::vector<Eigen::MatrixXcd> h;
};

/// Unit-norm precoding vectors. f[j] is M x K; column k precodes UE k of
/// cell j at BS j.
struct PrecoderSet {
  std::vector<Eigen::MatrixXcd> f;
};

/// Expected channel gains a (L x K) and interference gains b, indexed
/// b(l*K+i, j*K+k) for transmit pair (l,i) and receive pair (j,k).
struct GainTable {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  double sigma2 = 0.0;
};

/// Center of cell j's square in the global frame.
Eigen::Vector2d cell_origin(const NetworkConfig& cfg, int cell);
Eigen::Vector2d bs_position(const NetworkConfig& cfg, int cell);

/// Uniform placement of every UE inside its own cell square.
UEPlacement place_ues(const NetworkConfig& cfg, Rng& rng);

/// Large-scale fading in dB: -148.1 - 37.6*log10(d/1km), distance floored at
/// cfg.min_dist_m. Shadowing (if shadow_std_db > 0) is drawn once per BS-UE
/// pair from rng.
double pathloss_db(double distance_m);
LargeScale large_scale_gains(const NetworkConfig& cfg, const UEPlacement& placement, Rng& rng);

/// i.i.d. Rayleigh small-scale fading on top of the given large-scale gains:
/// h = sqrt(beta) * g with g ~ CN(0, I_M) per antenna.
ChannelRealization sample_channel(const NetworkConfig& cfg, const LargeScale& ls, Rng& rng);

/// Convenience overload: derives the large-scale gains (including shadowing)
/// from the same rng before drawing the fading.
ChannelRealization sample_channel(const NetworkConfig& cfg, const UEPlacement& placement, Rng& rng);

/// MR: f_jk = h^j_jk / ||h^j_jk||. MMMSE: regularized-inverse direction
/// (sum_{l,i} h^j_li (h^j_li)^H + sigma2 I)^-1 h^j_jk, normalized.
PrecoderSet compute_precoders(const NetworkConfig& cfg, const ChannelRealization& ch);

/// Monte-Carlo estimate of the expected channel/interference gains over
/// cfg.mc_realizations independent fading draws (precoders recomputed per
/// draw). Shadowing is drawn once up front from rng.
GainTable estimate_gains(const NetworkConfig& cfg, const UEPlacement& placement, Rng& rng);

/// scenario.json round trip: config echo + flattened gain arrays.
nlohmann::json scenario_to_json(const NetworkConfig& cfg, const GainTable& gains);
void scenario_from_json(const nlohmann::json& j, NetworkConfig& cfg, GainTable& gains);

}  // namespace mamimo
