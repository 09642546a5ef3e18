#include "mamimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mamimo/svg.hpp"

namespace fs = std::filesystem;

namespace mamimo {

ExperimentConfig::ExperimentConfig() {
  for (int i = 0; i <= 12; ++i) eps_grid.push_back(i * 0.01);
}

void ExperimentConfig::validate() const {
  network.validate();
  train.validate();
  if (n_train < 2 || n_test < 1) throw ConfigError("need n_train >= 2 and n_test >= 1");
  if (val_fraction <= 0.0 || val_fraction >= 1.0) throw ConfigError("val_fraction must be in (0,1)");
  if (eps_grid.empty()) throw ConfigError("eps_grid must be non-empty");
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    if (eps_grid[i] < 0.0) throw ConfigError("eps_grid entries must be >= 0");
    if (i > 0 && eps_grid[i] <= eps_grid[i - 1]) throw ConfigError("eps_grid must be ascending");
  }
  if (pgd_iters < 1) throw ConfigError("pgd_iters must be >= 1");
  if (histogram_bins < 2) throw ConfigError("histogram_bins must be >= 2");
  for (const std::string& v : victims)
    if (v != "model1" && v != "model2") throw ConfigError("unknown victim model: " + v);
  for (int c : cells)
    if (c < 0 || c >= network.cells) throw ConfigError("cell index out of range");
  if (victims.empty() || cells.empty()) throw ConfigError("victims and cells must be non-empty");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  std::vector<std::string> attacks, threats, defenses;
  for (auto a : c.attacks) attacks.push_back(to_string(a));
  for (auto t : c.threats) threats.push_back(to_string(t));
  for (auto d : c.defenses) defenses.push_back(to_string(d));
  j = nlohmann::json{{"out_dir", c.out_dir},
                     {"seed", c.seed},
                     {"network", c.network},
                     {"train", c.train},
                     {"n_train", c.n_train},
                     {"n_test", c.n_test},
                     {"val_fraction", c.val_fraction},
                     {"dae_alpha", c.dae_alpha},
                     {"dae_q", c.dae_q},
                     {"advtrain_alpha", c.advtrain_alpha},
                     {"advtrain_q", c.advtrain_q},
                     {"advtrain_lr_init", c.advtrain_lr_init},
                     {"victims", c.victims},
                     {"cells", c.cells},
                     {"attacks", attacks},
                     {"threats", threats},
                     {"defenses", defenses},
                     {"eps_grid", c.eps_grid},
                     {"pgd_iters", c.pgd_iters},
                     {"hist_alpha", c.hist_alpha},
                     {"histogram_bins", c.histogram_bins}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  ExperimentConfig d;
  c.out_dir = j.value("out_dir", d.out_dir);
  c.seed = j.value("seed", d.seed);
  if (j.contains("network")) c.network = j.at("network").get<NetworkConfig>();
  if (j.contains("train")) c.train = j.at("train").get<TrainConfig>();
  c.n_train = j.value("n_train", d.n_train);
  c.n_test = j.value("n_test", d.n_test);
  c.val_fraction = j.value("val_fraction", d.val_fraction);
  c.dae_alpha = j.value("dae_alpha", d.dae_alpha);
  c.dae_q = j.value("dae_q", d.dae_q);
  c.advtrain_alpha = j.value("advtrain_alpha", d.advtrain_alpha);
  c.advtrain_q = j.value("advtrain_q", d.advtrain_q);
  c.advtrain_lr_init = j.value("advtrain_lr_init", d.advtrain_lr_init);
  c.victims = j.value("victims", d.victims);
  c.cells = j.value("cells", d.cells);
  if (j.contains("attacks")) {
    c.attacks.clear();
    for (const auto& s : j.at("attacks")) c.attacks.push_back(attack_from_string(s));
  }
  if (j.contains("threats")) {
    c.threats.clear();
    for (const auto& s : j.at("threats")) c.threats.push_back(threat_from_string(s));
  }
  if (j.contains("defenses")) {
    c.defenses.clear();
    for (const auto& s : j.at("defenses")) c.defenses.push_back(defense_from_string(s));
  }
  c.eps_grid = j.value("eps_grid", d.eps_grid);
  c.pgd_iters = j.value("pgd_iters", d.pgd_iters);
  c.hist_alpha = j.value("hist_alpha", d.hist_alpha);
  c.histogram_bins = j.value("histogram_bins", d.histogram_bins);
  c.validate();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
    return j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("hash_file: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return fnv1a(ss.str());
}

SuccessCount attack_success_rate(const DefensePipeline& pipeline, const Eigen::MatrixXd& X,
                                 double p_max, int k) {
  if (X.cols() == 0) throw std::invalid_argument("attack_success_rate: empty sample set");
  Eigen::MatrixXd pred = defended_predict_batch(pipeline, X);
  SuccessCount sc;
  sc.n = X.cols();
  for (int c = 0; c < X.cols(); ++c)
    if (pred.col(c).head(k).sum() > p_max) ++sc.successes;
  return sc;
}

namespace {

Histogram histogram_of_sums(const std::vector<double>& sums, int bins, double p_max) {
  for (double s : sums)
    if (!std::isfinite(s))
      throw std::runtime_error("power_histogram: non-finite predicted power sum");
  Histogram h;
  h.threshold = p_max;
  h.n = static_cast<long>(sums.size());
  double lo = *std::min_element(sums.begin(), sums.end());
  double hi = *std::max_element(sums.begin(), sums.end());
  if (hi <= lo) hi = lo + 1.0;
  double w = (hi - lo) / bins;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + i * w;
  h.counts.assign(bins, 0);
  for (double s : sums) {
    int b = std::clamp(static_cast<int>((s - lo) / w), 0, bins - 1);
    ++h.counts[b];
    if (s > p_max) ++h.above_threshold;
  }
  return h;
}

std::vector<double> predicted_sums(const DefensePipeline& p, const Eigen::MatrixXd& X, int k) {
  Eigen::MatrixXd pred = defended_predict_batch(p, X);
  std::vector<double> sums(X.cols());
  for (int c = 0; c < X.cols(); ++c) sums[c] = pred.col(c).head(k).sum();
  return sums;
}

}  // namespace

Histogram power_histogram(const DefensePipeline& pipeline, const Eigen::MatrixXd& X, int bins,
                          double p_max, int k) {
  if (bins < 2) throw std::invalid_argument("power_histogram: bins must be >= 2");
  return histogram_of_sums(predicted_sums(pipeline, X, k), bins, p_max);
}

namespace {

struct Condition {
  const MlpModel* gradient_model;
  DefensePipeline pipeline;
};

// Deployed regressor per defense; the semi-white-box adversary differentiates
// it, the black-box adversary uses the surrogate.
Condition make_condition(const CellArtifacts& art, DefenseKind defense, Threat threat,
                         double label_scale) {
  Condition c;
  c.pipeline.kind = defense;
  c.pipeline.label_scale = label_scale;
  switch (defense) {
    case DefenseKind::None:
      c.pipeline.regressor = &art.victim;
      break;
    case DefenseKind::Dae:
      if (!art.has_dae) throw ConfigError("sweep: DAE artifact missing");
      c.pipeline.regressor = &art.victim;
      c.pipeline.dae = &art.dae;
      break;
    case DefenseKind::AdvTrain:
      if (!art.has_advtrain) throw ConfigError("sweep: adversarial-training artifact missing");
      c.pipeline.regressor = &art.advtrain;
      break;
    case DefenseKind::Distill:
      if (!art.has_distill) throw ConfigError("sweep: distillation artifact missing");
      c.pipeline.regressor = &art.distill;
      break;
  }
  c.gradient_model = (threat == Threat::BlackBox) ? &art.surrogate : c.pipeline.regressor;
  return c;
}

}  // namespace

EvalReport sweep(const ExperimentConfig& cfg, const std::vector<CellArtifacts>& arts) {
  const int k = cfg.network.ues_per_cell;
  const double p_max = cfg.network.p_max_dl_mw;
  const double label_scale = 1.0 / p_max;
  EvalReport report;

  for (AttackKind attack : cfg.attacks) {
    for (Threat threat : cfg.threats) {
      for (DefenseKind defense : cfg.defenses) {
        for (double eps : cfg.eps_grid) {
          EvalRow row;
          row.attack = attack;
          row.threat = threat;
          row.defense = defense;
          row.epsilon = eps;
          for (const CellArtifacts& art : arts) {
            Condition c = make_condition(art, defense, threat, label_scale);
            Eigen::MatrixXd xin;
            if (eps == 0.0) {
              xin = art.x_test;  // delta = 0: clean inputs
            } else {
              ThreatContext ctx{c.gradient_model, threat};
              xin = (attack == AttackKind::FGSM)
                        ? fgsm_perturb(ctx, art.x_test, eps, k)
                        : pgd_perturb(ctx, art.x_test, eps / cfg.pgd_iters, cfg.pgd_iters, k);
            }
            SuccessCount sc = attack_success_rate(c.pipeline, xin, p_max, k);
            row.successes += sc.successes;
            row.n += sc.n;
          }
          row.success_rate = static_cast<double>(row.successes) / row.n;
          report.rows.push_back(row);
        }
      }
    }
  }

  // Histogram conditions: clean and PGD at hist_alpha per available defense.
  double hist_eps = cfg.hist_alpha * cfg.pgd_iters;
  std::map<std::string, std::vector<double>> sums;
  for (const CellArtifacts& art : arts) {
    {
      Condition c = make_condition(art, DefenseKind::None, Threat::SemiWhiteBox, label_scale);
      auto s = predicted_sums(c.pipeline, art.x_test, k);
      auto& dst = sums["clean_none"];
      dst.insert(dst.end(), s.begin(), s.end());
    }
    for (DefenseKind defense : cfg.defenses) {
      if (defense == DefenseKind::Dae && !art.has_dae) continue;
      if (defense == DefenseKind::AdvTrain && !art.has_advtrain) continue;
      if (defense == DefenseKind::Distill && !art.has_distill) continue;
      Condition c = make_condition(art, defense, Threat::SemiWhiteBox, label_scale);
      ThreatContext ctx{c.gradient_model, Threat::SemiWhiteBox};
      Eigen::MatrixXd xin = pgd_perturb(ctx, art.x_test, cfg.hist_alpha, cfg.pgd_iters, k);
      auto s = predicted_sums(c.pipeline, xin, k);
      auto& dst = sums["pgd_swb_" + to_string(defense)];
      dst.insert(dst.end(), s.begin(), s.end());
    }
  }
  (void)hist_eps;
  for (auto& [label, v] : sums)
    report.histograms[label] = histogram_of_sums(v, cfg.histogram_bins, p_max);
  return report;
}

void emit_report(const EvalReport& report, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream f(dir + "/results.csv");
    if (!f) throw std::runtime_error("cannot open for write: " + dir + "/results.csv");
    f << "attack,threat,defense,epsilon,success_rate,n\n";
    char buf[128];
    for (const EvalRow& r : report.rows) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r.epsilon, r.success_rate);
      f << to_string(r.attack) << ',' << to_string(r.threat) << ',' << to_string(r.defense) << ','
        << buf << ',' << r.n << '\n';
    }
  }
  {
    std::ofstream f(dir + "/histograms.csv");
    f << "label,bin_lo,bin_hi,count,threshold\n";
    f.precision(17);
    for (const auto& [label, h] : report.histograms)
      for (size_t i = 0; i < h.counts.size(); ++i)
        f << label << ',' << h.edges[i] << ',' << h.edges[i + 1] << ',' << h.counts[i] << ','
          << h.threshold << '\n';
  }

  // One line chart per (attack, threat): success rate vs epsilon, one curve
  // per defense.
  std::map<std::pair<AttackKind, Threat>, std::map<DefenseKind, Series>> charts;
  for (const EvalRow& r : report.rows) {
    Series& s = charts[{r.attack, r.threat}][r.defense];
    s.label = to_string(r.defense);
    s.x.push_back(r.epsilon);
    s.y.push_back(r.success_rate);
  }
  for (const auto& [key, curves] : charts) {
    std::vector<Series> series;
    for (const auto& [d, s] : curves) series.push_back(s);
    std::string name = to_string(key.first) + "_" + to_string(key.second);
    std::ofstream f(dir + "/" + name + ".svg");
    f << svg_line_chart("attack success rate: " + name, "epsilon (normalized)", "success rate",
                        series);
  }
  for (const auto& [label, h] : report.histograms) {
    std::ofstream f(dir + "/hist_" + label + ".svg");
    f << svg_histogram("predicted power: " + label, h.edges, h.counts, h.threshold);
  }
}

EvalReport load_results_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  std::string line;
  if (!std::getline(f, line) || line != "attack,threat,defense,epsilon,success_rate,n")
    throw std::runtime_error(path + ": bad results header");
  EvalReport rep;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string attack, threat, defense, eps, rate, n;
    std::getline(ss, attack, ',');
    std::getline(ss, threat, ',');
    std::getline(ss, defense, ',');
    std::getline(ss, eps, ',');
    std::getline(ss, rate, ',');
    std::getline(ss, n, ',');
    EvalRow r;
    r.attack = attack_from_string(attack);
    r.threat = threat_from_string(threat);
    r.defense = defense_from_string(defense);
    r.epsilon = std::stod(eps);
    r.success_rate = std::stod(rate);
    r.n = std::stol(n);
    r.successes = std::lround(r.success_rate * r.n);
    rep.rows.push_back(r);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// run_experiment: staged pipeline with content-hash caching.

namespace {

struct Manifest {
  nlohmann::json stages = nlohmann::json::object();
  std::string path;

  static Manifest load(const std::string& p) {
    Manifest m;
    m.path = p;
    std::ifstream f(p);
    if (f) {
      try {
        f >> m.stages;
      } catch (...) {
        m.stages = nlohmann::json::object();
      }
    }
    return m;
  }
  bool fresh(const std::string& stage, std::uint64_t hash,
             const std::vector<std::string>& outputs) const {
    if (!stages.contains(stage) || stages[stage].get<std::uint64_t>() != hash) return false;
    for (const std::string& o : outputs)
      if (!fs::exists(o)) return false;
    return true;
  }
  void record(const std::string& stage, std::uint64_t hash) {
    stages[stage] = hash;
    std::ofstream f(path);
    f << stages.dump(2);
  }
};

struct Stage {
  std::string name;
  Manifest& manifest;
  std::uint64_t hash;
  std::vector<std::string> outputs;
  bool verbose;

  bool cached() const {
    bool hit = manifest.fresh(name, hash, outputs);
    if (verbose) std::printf("[%s] %s\n", hit ? "cached" : "run   ", name.c_str());
    return hit;
  }
  void done() { manifest.record(name, hash); }
};

MlpModel build_arch(const std::string& name, int k, int l, Rng rng) {
  if (name == "model1") return build_model1(k, l, rng);
  if (name == "model2") return build_model2(k, l, rng);
  throw ConfigError("unknown architecture: " + name);
}

std::string other_arch(const std::string& name) {
  return name == "model1" ? "model2" : "model1";
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, bool verbose, StageLimit until) {
  cfg.validate();
  const std::string out = cfg.out_dir;
  fs::create_directories(out);
  fs::create_directories(out + "/models");
  fs::create_directories(out + "/defense");
  Manifest manifest = Manifest::load(out + "/manifest.json");

  const int K = cfg.network.ues_per_cell;
  const int L = cfg.network.cells;
  nlohmann::json cfg_json = cfg;

  const std::string train_csv = out + "/train.csv";
  const std::string test_csv = out + "/test.csv";
  const std::string norm_json = out + "/normalizer.json";

  // Stage: dataset ---------------------------------------------------------
  {
    nlohmann::json in{{"network", cfg.network},
                      {"seed", cfg.seed},
                      {"n_train", cfg.n_train},
                      {"n_test", cfg.n_test}};
    Stage st{"dataset", manifest, fnv1a(in.dump()), {train_csv, test_csv, norm_json}, verbose};
    if (!st.cached()) {
      DatasetGenStats stats;
      Dataset all = generate_dataset(cfg.network, cfg.n_train + cfg.n_test, &stats);
      if (verbose && stats.solver_failures)
        std::printf("  dataset: %d solver failures skipped\n", stats.solver_failures);
      Dataset train_set, test_set;
      Rng split_rng = make_rng(cfg.seed, 0x5b17);
      split(all, cfg.n_train, cfg.n_test, split_rng, train_set, test_set);
      Normalizer nz = fit_normalizer(train_set, cfg.network.p_max_dl_mw);
      save_csv(train_set, train_csv);
      save_csv(test_set, test_csv);
      save_normalizer(nz, norm_json);
      st.done();
    }
  }
  if (until == StageLimit::Dataset) return 0;

  Dataset train_set = load_csv(train_csv);
  Dataset test_set = load_csv(test_csv);
  Normalizer nz = load_normalizer(norm_json);
  std::uint64_t data_hash = hash_file(train_csv) ^ hash_file(norm_json);

  // Normalized features are shared across cells.
  Eigen::MatrixXd Xall = nz.apply_cols(feature_matrix(train_set, 0));
  Eigen::MatrixXd Xte = nz.apply_cols(feature_matrix(test_set, 0));
  int n_val = std::max(1, static_cast<int>(std::lround(cfg.val_fraction * train_set.draws())));
  int n_tr = train_set.draws() - n_val;
  Eigen::MatrixXd Xtr = Xall.leftCols(n_tr);
  Eigen::MatrixXd Xval = Xall.rightCols(n_val);

  auto labels_scaled = [&](const Dataset& d, int cell) {
    return (label_matrix(d, cell) * nz.label_scale).eval();
  };

  bool need_bb = std::find(cfg.threats.begin(), cfg.threats.end(), Threat::BlackBox) !=
                 cfg.threats.end();

  auto model_path = [&](const std::string& tag, int cell) {
    return out + "/models/" + tag + "_cell" + std::to_string(cell) + ".json";
  };
  auto defense_path = [&](const std::string& tag, int cell) {
    return out + "/defense/" + tag + "_cell" + std::to_string(cell) + ".json";
  };

  // Stage: train -----------------------------------------------------------
  auto train_stage = [&](const std::string& tag, const std::string& arch, int cell,
                         std::uint64_t seed_salt) {
    std::string path = model_path(tag, cell);
    nlohmann::json in{{"train", cfg.train}, {"arch", arch}, {"cell", cell},
                      {"salt", seed_salt},  {"seed", cfg.seed}, {"data", data_hash}};
    Stage st{"train:" + tag + ":c" + std::to_string(cell), manifest, fnv1a(in.dump()),
             {path}, verbose};
    if (st.cached()) return;
    Eigen::MatrixXd Y = labels_scaled(train_set, cell);
    TrainConfig tc = cfg.train;
    tc.seed = mix_seed(cfg.seed, seed_salt + cell);
    MlpModel m = build_arch(arch, K, L, make_rng(tc.seed, 77));
    TrainHistory h = train(m, Xtr, Y.leftCols(n_tr), Xval, Y.rightCols(n_val), tc,
                           LossKind::RelMse);
    save_model(m, path);
    save_history(h, out + "/models/" + tag + "_cell" + std::to_string(cell) + "_history.csv");
    st.done();
  };

  try {
    for (int cell : cfg.cells) {
      for (const std::string& v : cfg.victims) train_stage(v, v, cell, fnv1a(v));
      if (need_bb)
        for (const std::string& v : cfg.victims)
          train_stage("surr_" + v, other_arch(v), cell, fnv1a("surr_" + v));
    }
    if (until == StageLimit::Train) return 0;

    // Stage: defend --------------------------------------------------------
    for (int cell : cfg.cells) {
      for (const std::string& v : cfg.victims) {
        std::uint64_t victim_hash = hash_file(model_path(v, cell));
        for (DefenseKind d : cfg.defenses) {
          if (d == DefenseKind::None) continue;
          std::string tag = to_string(d) + "_" + v;
          std::string path = defense_path(tag, cell);
          nlohmann::json in{{"kind", to_string(d)},      {"victim", victim_hash},
                            {"train", cfg.train},        {"dae_alpha", cfg.dae_alpha},
                            {"dae_q", cfg.dae_q},        {"advtrain_alpha", cfg.advtrain_alpha},
                            {"advtrain_q", cfg.advtrain_q}, {"advtrain_lr", cfg.advtrain_lr_init},
                            {"seed", cfg.seed},          {"data", data_hash}};
          Stage st{"defend:" + tag + ":c" + std::to_string(cell), manifest, fnv1a(in.dump()),
                   {path}, verbose};
          if (st.cached()) continue;
          MlpModel victim = load_model(model_path(v, cell));
          TrainConfig tc = cfg.train;
          tc.seed = mix_seed(cfg.seed, fnv1a(tag) + cell);
          if (d == DefenseKind::Dae) {
            DaePairs pairs = build_dae_trainset(victim, Xtr, cfg.dae_alpha, cfg.dae_q, K);
            MlpModel dae = train_dae(pairs, tc, K, L);
            save_model(dae, path);
          } else if (d == DefenseKind::AdvTrain) {
            Eigen::MatrixXd Y = labels_scaled(train_set, cell);
            tc.lr_init = cfg.advtrain_lr_init;
            adversarial_training(victim, Xtr, Y.leftCols(n_tr), Xval, Y.rightCols(n_val),
                                 cfg.advtrain_alpha, cfg.advtrain_q, K, tc);
            save_model(victim, path);
          } else {
            MlpModel student = defensive_distillation(victim, Xtr, Xval, tc);
            save_model(student, path);
          }
          st.done();
        }
      }
    }
    if (until == StageLimit::Defend) return 0;

    // Stage: sweep + report ------------------------------------------------
    for (const std::string& v : cfg.victims) {
      std::uint64_t art_hash = data_hash;
      for (int cell : cfg.cells) {
        art_hash ^= hash_file(model_path(v, cell));
        if (need_bb) art_hash ^= hash_file(model_path("surr_" + v, cell));
        for (DefenseKind d : cfg.defenses)
          if (d != DefenseKind::None)
            art_hash ^= hash_file(defense_path(to_string(d) + "_" + v, cell));
      }
      std::string report_dir = out + "/report_" + v;
      nlohmann::json in{{"artifacts", art_hash}, {"config", cfg_json}};
      Stage st{"sweep:" + v, manifest, fnv1a(in.dump()), {report_dir + "/results.csv"}, verbose};
      if (st.cached()) continue;
      std::vector<CellArtifacts> arts;
      for (int cell : cfg.cells) {
        CellArtifacts a;
        a.victim = load_model(model_path(v, cell));
        if (need_bb) a.surrogate = load_model(model_path("surr_" + v, cell));
        for (DefenseKind d : cfg.defenses) {
          if (d == DefenseKind::None) continue;
          std::string p = defense_path(to_string(d) + "_" + v, cell);
          if (!fs::exists(p)) throw ConfigError("missing defense artifact: " + p);
          if (d == DefenseKind::Dae) {
            a.dae = load_model(p);
            a.has_dae = true;
          } else if (d == DefenseKind::AdvTrain) {
            a.advtrain = load_model(p);
            a.has_advtrain = true;
          } else {
            a.distill = load_model(p);
            a.has_distill = true;
          }
        }
        a.x_test = Xte;
        arts.push_back(std::move(a));
      }
      EvalReport report = sweep(cfg, arts);
      emit_report(report, report_dir);
      st.done();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("run_experiment stage failure: ") + e.what());
  }
  return 0;
}

}  // namespace mamimo
