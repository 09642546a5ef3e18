#include "mamimo/scenario.hpp"

#include <cmath>
#include <complex>

namespace mamimo {

Eigen::Vector2d cell_origin(const NetworkConfig& cfg, int cell) {
  int s = cfg.grid_side();
  int gx = cell % s;
  int gy = cell / s;
  return {gx * cfg.cell_side_m, gy * cfg.cell_side_m};
}

Eigen::Vector2d bs_position(const NetworkConfig& cfg, int cell) {
  return cell_origin(cfg, cell) + Eigen::Vector2d(cfg.cell_side_m / 2.0, cfg.cell_side_m / 2.0);
}

UEPlacement place_ues(const NetworkConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, cfg.cell_side_m);
  UEPlacement p;
  p.pos.resize(cfg.total_ues(), 2);
  for (int j = 0; j < cfg.cells; ++j) {
    Eigen::Vector2d o = cell_origin(cfg, j);
    for (int k = 0; k < cfg.ues_per_cell; ++k) {
      int row = j * cfg.ues_per_cell + k;
      p.pos(row, 0) = o.x() + u(rng);
      p.pos(row, 1) = o.y() + u(rng);
    }
  }
  return p;
}

double pathloss_db(double distance_m) {
  return -148.1 - 37.6 * std::log10(distance_m / 1000.0);
}

LargeScale large_scale_gains(const NetworkConfig& cfg, const UEPlacement& placement, Rng& rng) {
  std::normal_distribution<double> shadow(0.0, cfg.shadow_std_db);
  LargeScale ls;
  ls.beta.resize(cfg.cells, cfg.total_ues());
  for (int l = 0; l < cfg.cells; ++l) {
    Eigen::Vector2d bs = bs_position(cfg, l);
    for (int u = 0; u < cfg.total_ues(); ++u) {
      double d = (placement.pos.row(u).transpose() - bs).norm();
      d = std::max(d, cfg.min_dist_m);
      double db = pathloss_db(d);
      if (cfg.shadow_std_db > 0.0) db += shadow(rng);
      ls.beta(l, u) = std::pow(10.0, db / 10.0);
    }
  }
  return ls;
}

ChannelRealization sample_channel(const NetworkConfig& cfg, const LargeScale& ls, Rng& rng) {
  // CN(0,1) per antenna: real/imag parts N(0, 1/2)
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ChannelRealization ch;
  ch.h.resize(cfg.cells);
  for (int l = 0; l < cfg.cells; ++l) {
    ch.h[l].resize(cfg.antennas, cfg.total_ues());
    for (int u = 0; u < cfg.total_ues(); ++u) {
      double scale = std::sqrt(ls.beta(l, u));
      for (int m = 0; m < cfg.antennas; ++m) {
        ch.h[l](m, u) = scale * std::complex<double>(g(rng), g(rng));
      }
    }
  }
  return ch;
}

ChannelRealization sample_channel(const NetworkConfig& cfg, const UEPlacement& placement, Rng& rng) {
  LargeScale ls = large_scale_gains(cfg, placement, rng);
  return sample_channel(cfg, ls, rng);
}

PrecoderSet compute_precoders(const NetworkConfig& cfg, const ChannelRealization& ch) {
  PrecoderSet ps;
  ps.f.resize(cfg.cells);
  const double sigma2 = cfg.noise_mw();
  for (int j = 0; j < cfg.cells; ++j) {
    ps.f[j].resize(cfg.antennas, cfg.ues_per_cell);
    if (cfg.precoder == Precoder::MR) {
      for (int k = 0; k < cfg.ues_per_cell; ++k) {
        Eigen::VectorXcd h = ch.h[j].col(j * cfg.ues_per_cell + k);
        double n = h.norm();
        if (n == 0.0) throw std::runtime_error("zero channel vector in MR precoder");
        ps.f[j].col(k) = h / n;
      }
    } else {
      // Regularized inverse over all channels seen by BS j (perfect CSI).
      Eigen::MatrixXcd gram = ch.h[j] * ch.h[j].adjoint();
      gram.diagonal().array() += sigma2;
      Eigen::LDLT<Eigen::MatrixXcd> ldlt(gram);
      if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("MMMSE precoder: regularized matrix factorization failed");
      for (int k = 0; k < cfg.ues_per_cell; ++k) {
        Eigen::VectorXcd v = ldlt.solve(ch.h[j].col(j * cfg.ues_per_cell + k));
        double n = v.norm();
        if (n == 0.0 || !std::isfinite(n))
          throw std::runtime_error("MMMSE precoder: degenerate solve result");
        ps.f[j].col(k) = v / n;
      }
    }
  }
  return ps;
}

GainTable estimate_gains(const NetworkConfig& cfg, const UEPlacement& placement, Rng& rng) {
  const int L = cfg.cells, K = cfg.ues_per_cell;
  const int n_pairs = L * K;
  LargeScale ls = large_scale_gains(cfg, placement, rng);

  // c(j,k) accumulates f_jk^H h^j_jk; cross(li, jk) accumulates |f_li^H h^l_jk|^2.
  Eigen::MatrixXcd c_sum = Eigen::MatrixXcd::Zero(L, K);
  Eigen::MatrixXd c_sq_sum = Eigen::MatrixXd::Zero(L, K);
  Eigen::MatrixXd cross_sum = Eigen::MatrixXd::Zero(n_pairs, n_pairs);

  for (int r = 0; r < cfg.mc_realizations; ++r) {
    ChannelRealization ch = sample_channel(cfg, ls, rng);
    PrecoderSet ps = compute_precoders(cfg, ch);
    for (int l = 0; l < L; ++l) {
      // All inner products between BS l's precoders and BS l's channels.
      Eigen::MatrixXcd prods = ps.f[l].adjoint() * ch.h[l];  // K x (L*K)
      for (int i = 0; i < K; ++i) {
        int tx = l * K + i;
        for (int rx = 0; rx < n_pairs; ++rx) {
          cross_sum(tx, rx) += std::norm(prods(i, rx));
        }
      }
      for (int k = 0; k < K; ++k) {
        std::complex<double> c = prods(k, l * K + k);
        c_sum(l, k) += c;
        c_sq_sum(l, k) += std::norm(c);
      }
    }
  }

  const double R = static_cast<double>(cfg.mc_realizations);
  GainTable g;
  g.sigma2 = cfg.noise_mw();
  g.a.resize(L, K);
  g.b = cross_sum / R;
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      double a = std::norm(c_sum(j, k) / R);
      g.a(j, k) = a;
      int p = j * K + k;
      // Same-pair entry is the variance of the precoded channel, clamped at 0
      // against estimator noise.
      g.b(p, p) = std::max(0.0, c_sq_sum(j, k) / R - a);
    }
  }
  return g;
}

nlohmann::json scenario_to_json(const NetworkConfig& cfg, const GainTable& gains) {
  std::vector<double> a, b;
  for (int j = 0; j < gains.a.rows(); ++j)
    for (int k = 0; k < gains.a.cols(); ++k) a.push_back(gains.a(j, k));
  for (int t = 0; t < gains.b.rows(); ++t)
    for (int r = 0; r < gains.b.cols(); ++r) b.push_back(gains.b(t, r));
  return nlohmann::json{{"config", cfg}, {"a", a}, {"b", b}, {"sigma2", gains.sigma2}};
}

void scenario_from_json(const nlohmann::json& j, NetworkConfig& cfg, GainTable& gains) {
  cfg = j.at("config").get<NetworkConfig>();
  const int L = cfg.cells, K = cfg.ues_per_cell, P = L * K;
  auto a = j.at("a").get<std::vector<double>>();
  auto b = j.at("b").get<std::vector<double>>();
  if (static_cast<int>(a.size()) != L * K || static_cast<int>(b.size()) != P * P)
    throw std::runtime_error("scenario json: gain array size mismatch");
  gains.a.resize(L, K);
  gains.b.resize(P, P);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < K; ++y) gains.a(x, y) = a[x * K + y];
  for (int t = 0; t < P; ++t)
    for (int r = 0; r < P; ++r) gains.b(t, r) = b[t * P + r];
  gains.sigma2 = j.at("sigma2").get<double>();
}

}  // namespace mamimo
