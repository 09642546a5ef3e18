// Command-line front end for the power-allocation robustness workbench.
//
// Subcommands:
//   scenario gen   sample UE positions and estimate channel gains -> scenario.json
//   dataset gen    generate train/test splits and the input normalizer
//   train          train the regressors (and black-box surrogates)
//   defend         fit a defense (dae | advtrain | distill) for each victim
//   attack craft   perturb the test inputs with FGSM or PGD
//   eval sweep     run the full pipeline and the (attack x threat x defense x eps) sweep
//   report         regenerate charts from an existing results.csv
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>

#include "mamimo/harness.hpp"
#include "mamimo/scenario.hpp"
#include "mamimo/svg.hpp"

namespace fs = std::filesystem;
using namespace mamimo;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

ExperimentConfig load_cfg(const GlobalOpts& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = load_experiment_config(g.config_path);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.has_seed) {
    cfg.seed = g.seed;
    cfg.network.seed = g.seed;
  }
  cfg.validate();
  return cfg;
}

int cmd_scenario_gen(const GlobalOpts& g) {
  ExperimentConfig cfg = load_cfg(g);
  Rng rng = make_rng(cfg.network.seed);
  UEPlacement placement = place_ues(cfg.network, rng);
  GainTable gains = estimate_gains(cfg.network, placement, rng);
  fs::create_directories(cfg.out_dir);
  std::string path = cfg.out_dir + "/scenario.json";
  std::ofstream f(path);
  f << scenario_to_json(cfg.network, gains).dump(2) << '\n';
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_report(const GlobalOpts& g) {
  ExperimentConfig cfg = load_cfg(g);
  bool any = false;
  for (const std::string& v : cfg.victims) {
    std::string dir = cfg.out_dir + "/report_" + v;
    std::string csv = dir + "/results.csv";
    if (!fs::exists(csv)) continue;
    EvalReport rep = load_results_csv(csv);
    emit_report(rep, dir);
    std::printf("re-emitted %s\n", dir.c_str());
    any = true;
  }
  if (!any) throw ConfigError("no results.csv found under " + cfg.out_dir);
  return 0;
}

struct AttackOpts {
  std::string attack = "fgsm";
  std::string threat = "swb";
  std::string model_path;
  std::string surrogate_path;
  double eps = 0.05;
  double alpha = 0.01;
  int iters = 10;
};

int cmd_attack_craft(const GlobalOpts& g, const AttackOpts& a) {
  ExperimentConfig cfg = load_cfg(g);
  std::string model_path = a.model_path.empty()
                               ? cfg.out_dir + "/models/" + cfg.victims.front() + "_cell" +
                                     std::to_string(cfg.cells.front()) + ".json"
                               : a.model_path;
  if (!fs::exists(model_path)) throw ConfigError("model not found: " + model_path);
  MlpModel victim = load_model(model_path);
  MlpModel surrogate;
  Threat threat = threat_from_string(a.threat);
  if (threat == Threat::BlackBox) {
    if (a.surrogate_path.empty()) throw ConfigError("--threat bb requires --surrogate");
    surrogate = load_model(a.surrogate_path);
  }
  std::string test_csv = cfg.out_dir + "/test.csv";
  std::string norm_json = cfg.out_dir + "/normalizer.json";
  if (!fs::exists(test_csv) || !fs::exists(norm_json))
    throw ConfigError("run `dataset gen` first: missing test.csv/normalizer.json in " +
                      cfg.out_dir);
  Dataset test_set = load_csv(test_csv);
  Normalizer nz = load_normalizer(norm_json);
  Eigen::MatrixXd X = nz.apply_cols(feature_matrix(test_set, cfg.cells.front()));

  ThreatContext ctx{threat == Threat::BlackBox ? &surrogate : &victim, threat};
  int k = cfg.network.ues_per_cell;
  AttackKind kind = attack_from_string(a.attack);
  Eigen::MatrixXd Xadv = (kind == AttackKind::FGSM) ? fgsm_perturb(ctx, X, a.eps, k)
                                                    : pgd_perturb(ctx, X, a.alpha, a.iters, k);
  std::string out_path = cfg.out_dir + "/crafted_" + a.attack + "_" + a.threat + ".csv";
  std::ofstream f(out_path);
  f.precision(17);
  for (int i = 0; i < X.rows(); ++i) f << (i ? "," : "") << "x_" << i;
  f << '\n';
  for (int c = 0; c < Xadv.cols(); ++c) {
    for (int i = 0; i < Xadv.rows(); ++i) f << (i ? "," : "") << Xadv(i, c);
    f << '\n';
  }
  std::printf("wrote %s (%ld samples)\n", out_path.c_str(), static_cast<long>(Xadv.cols()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"massive-MIMO power allocation adversarial robustness workbench"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "experiment config JSON");
  app.add_option("--out", g.out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed override for experiment and channel");

  auto* scenario = app.add_subcommand("scenario", "channel scenario tools");
  auto* scenario_gen = scenario->add_subcommand("gen", "sample placement + gains");
  auto* dataset = app.add_subcommand("dataset", "dataset tools");
  auto* dataset_gen = dataset->add_subcommand("gen", "generate labeled train/test data");
  auto* train_cmd = app.add_subcommand("train", "train regressors (and surrogates)");

  auto* defend = app.add_subcommand("defend", "fit a defense");
  std::string defense_kind;
  for (const char* d : {"dae", "advtrain", "distill"}) defend->add_subcommand(d);
  defend->require_subcommand(1);

  auto* attack = app.add_subcommand("attack", "adversarial example tools");
  auto* attack_craft = attack->add_subcommand("craft", "perturb the test inputs");
  AttackOpts a;
  attack_craft->add_option("--attack", a.attack, "fgsm|pgd")
      ->check(CLI::IsMember({"fgsm", "pgd"}));
  attack_craft->add_option("--threat", a.threat, "swb|bb")->check(CLI::IsMember({"swb", "bb"}));
  attack_craft->add_option("--model", a.model_path, "victim model JSON");
  attack_craft->add_option("--surrogate", a.surrogate_path, "surrogate model JSON (bb)");
  attack_craft->add_option("--eps", a.eps, "FGSM epsilon (normalized)");
  attack_craft->add_option("--alpha", a.alpha, "PGD step size");
  attack_craft->add_option("--iters", a.iters, "PGD iterations");

  auto* eval = app.add_subcommand("eval", "evaluation tools");
  auto* eval_sweep = eval->add_subcommand("sweep", "full pipeline + success-rate sweep");
  auto* report_cmd = app.add_subcommand("report", "regenerate charts from results.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }
  g.has_seed = seed_opt->count() > 0;

  try {
    if (scenario->parsed() && scenario_gen->parsed()) return cmd_scenario_gen(g);
    if (dataset->parsed() && dataset_gen->parsed())
      return run_experiment(load_cfg(g), true, StageLimit::Dataset);
    if (train_cmd->parsed()) return run_experiment(load_cfg(g), true, StageLimit::Train);
    if (defend->parsed()) {
      ExperimentConfig cfg = load_cfg(g);
      DefenseKind kind = defense_from_string(defend->get_subcommands().front()->get_name());
      cfg.defenses = {DefenseKind::None, kind};
      return run_experiment(cfg, true, StageLimit::Defend);
    }
    if (attack->parsed() && attack_craft->parsed()) return cmd_attack_craft(g, a);
    if (eval->parsed() && eval_sweep->parsed()) return run_experiment(load_cfg(g), true);
    if (report_cmd->parsed()) return cmd_report(g);
    std::fprintf(stderr, "missing subcommand\n");
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 2;
  }
}
