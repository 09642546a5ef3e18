#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mamimo/harness.hpp"
#include "mamimo/svg.hpp"

using namespace mamimo;
namespace fs = std::filesystem;

namespace {

Eigen::MatrixXd random_mat(int r, int c, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

// Pass-through "regressor": one linear layer, identity weights, so predicted
// powers equal the raw inputs.
MlpModel identity_model(int dim) {
  MlpModel m;
  Layer l;
  l.W = Eigen::MatrixXd::Identity(dim, dim);
  l.b = Eigen::VectorXd::Zero(dim);
  l.act = Act::Linear;
  m.layers.push_back(l);
  return m;
}

// Minimal well-formedness check: tags balance and the document parses as a
// single element tree.
bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  size_t i = 0;
  while ((i = text.find('<', i)) != std::string::npos) {
    size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    bool closing = tag[0] == '/';
    bool self = tag.back() == '/';
    std::string name = tag.substr(closing ? 1 : 0);
    name = name.substr(0, name.find_first_of(" \t\n/"));
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

ExperimentConfig tiny_experiment(const std::string& out) {
  ExperimentConfig cfg;
  cfg.out_dir = out;
  cfg.seed = 13;
  cfg.network.cells = 4;
  cfg.network.ues_per_cell = 2;
  cfg.network.antennas = 4;
  cfg.network.mc_realizations = 10;
  cfg.network.seed = 13;
  cfg.train.max_epochs = 3;
  cfg.train.batch_size = 16;
  cfg.n_train = 40;
  cfg.n_test = 10;
  cfg.eps_grid = {0.0, 0.05};
  cfg.histogram_bins = 5;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("success rate counts strict budget violations") {
  MlpModel m = identity_model(2);  // k = 1: first output is the power sum
  DefensePipeline p{DefenseKind::None, nullptr, &m, 1.0};
  Eigen::MatrixXd X(2, 3);
  X << 480.0, 520.0, 510.0, 0.0, 0.0, 0.0;
  SuccessCount sc = attack_success_rate(p, X, 500.0, 1);
  CHECK(sc.successes == 2);
  CHECK(sc.n == 3);
  CHECK(sc.rate() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  Eigen::MatrixXd feasible = Eigen::MatrixXd::Constant(2, 4, 10.0);
  CHECK(attack_success_rate(p, feasible, 500.0, 1).successes == 0);
  // Boundary value is feasible (strict inequality).
  Eigen::MatrixXd edge = Eigen::MatrixXd::Constant(2, 1, 0.0);
  edge(0, 0) = 500.0;
  CHECK(attack_success_rate(p, edge, 500.0, 1).successes == 0);
}

TEST_CASE("histogram counts cover all samples and mark the threshold") {
  MlpModel m = identity_model(2);
  DefensePipeline p{DefenseKind::None, nullptr, &m, 1.0};
  Eigen::MatrixXd X = random_mat(2, 200, 90);
  X.row(0) = X.row(0).array() * 100.0 + 450.0;
  Histogram h = power_histogram(p, X, 12, 500.0, 1);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == 200);
  CHECK(h.n == 200);
  CHECK(h.edges.size() == 13);
  long manual = 0;
  for (int c = 0; c < X.cols(); ++c)
    if (X(0, c) > 500.0) ++manual;
  CHECK(h.above_threshold == manual);
  // Shifting predictions by -p_max moves exactly the infeasible mass across 0.
  Eigen::MatrixXd Xs = X;
  Xs.row(0).array() -= 500.0;
  Histogram hs = power_histogram(p, Xs, 12, 0.0, 1);
  CHECK(hs.above_threshold == h.above_threshold);
  CHECK_THROWS(power_histogram(p, X, 1, 500.0, 1));
}

TEST_CASE("default epsilon grid has 13 ascending entries") {
  ExperimentConfig cfg;
  REQUIRE(cfg.eps_grid.size() == 13);
  CHECK(cfg.eps_grid.front() == 0.0);
  CHECK(cfg.eps_grid.back() == doctest::Approx(0.12).epsilon(1e-12));
  for (size_t i = 1; i < cfg.eps_grid.size(); ++i) CHECK(cfg.eps_grid[i] > cfg.eps_grid[i - 1]);
}

TEST_CASE("experiment config validation rejects bad grids and names") {
  ExperimentConfig cfg;
  cfg.eps_grid = {0.05, 0.01};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.victims = {"model3"};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.cells = {9};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("experiment config json round trip") {
  ExperimentConfig cfg = tiny_experiment("/tmp/x");
  nlohmann::json j = cfg;
  ExperimentConfig back = j.get<ExperimentConfig>();
  CHECK(back.out_dir == cfg.out_dir);
  CHECK(back.seed == cfg.seed);
  CHECK(back.n_train == cfg.n_train);
  CHECK(back.eps_grid == cfg.eps_grid);
  CHECK(back.network.ues_per_cell == cfg.network.ues_per_cell);
  CHECK(back.train.max_epochs == cfg.train.max_epochs);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("sweep: eps-zero rows equal the clean rate and grids emit full row sets") {
  ExperimentConfig cfg = tiny_experiment("/tmp/unused");
  cfg.defenses = {DefenseKind::None};
  cfg.threats = {Threat::SemiWhiteBox};
  const int in = cfg.network.input_dim();
  Rng rng = make_rng(91);
  CellArtifacts art;
  art.victim = build_model1(cfg.network.ues_per_cell, cfg.network.cells, rng);
  art.x_test = random_mat(in, 30, 92);
  EvalReport rep = sweep(cfg, {art});
  // attacks(2) x threats(1) x defenses(1) x eps(2)
  REQUIRE(rep.rows.size() == 4);
  DefensePipeline p{DefenseKind::None, nullptr, &art.victim,
                    1.0 / cfg.network.p_max_dl_mw};
  SuccessCount clean = attack_success_rate(p, art.x_test, cfg.network.p_max_dl_mw,
                                           cfg.network.ues_per_cell);
  for (const EvalRow& r : rep.rows)
    if (r.epsilon == 0.0) CHECK(r.successes == clean.successes);
  CHECK(rep.histograms.count("clean_none") == 1);
}

TEST_CASE("report emission round-trips through results.csv and writes valid svg") {
  ExperimentConfig cfg = tiny_experiment("/tmp/unused2");
  cfg.defenses = {DefenseKind::None};
  const int in = cfg.network.input_dim();
  Rng rng = make_rng(93);
  CellArtifacts art;
  art.victim = build_model1(cfg.network.ues_per_cell, cfg.network.cells, rng);
  art.surrogate = build_model2(cfg.network.ues_per_cell, cfg.network.cells, rng);
  art.x_test = random_mat(in, 20, 94);
  EvalReport rep = sweep(cfg, {art});

  std::string dir = (fs::temp_directory_path() / "mamimo_report_rt").string();
  fs::remove_all(dir);
  emit_report(rep, dir);
  EvalReport back = load_results_csv(dir + "/results.csv");
  REQUIRE(back.rows.size() == rep.rows.size());
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(back.rows[i].attack == rep.rows[i].attack);
    CHECK(back.rows[i].threat == rep.rows[i].threat);
    CHECK(back.rows[i].defense == rep.rows[i].defense);
    CHECK(back.rows[i].epsilon == rep.rows[i].epsilon);
    CHECK(back.rows[i].success_rate == rep.rows[i].success_rate);
    CHECK(back.rows[i].n == rep.rows[i].n);
    CHECK(back.rows[i].successes == rep.rows[i].successes);
  }
  int svgs = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".svg") {
      CHECK(xml_well_formed(slurp(e.path().string())));
      ++svgs;
    }
  CHECK(svgs >= 3);
  fs::remove_all(dir);
}

TEST_CASE("full tiny experiment is deterministic and cached") {
  std::string d1 = (fs::temp_directory_path() / "mamimo_exp_a").string();
  std::string d2 = (fs::temp_directory_path() / "mamimo_exp_b").string();
  fs::remove_all(d1);
  fs::remove_all(d2);
  ExperimentConfig c1 = tiny_experiment(d1);
  ExperimentConfig c2 = tiny_experiment(d2);
  REQUIRE(run_experiment(c1, false) == 0);
  REQUIRE(run_experiment(c2, false) == 0);
  for (const std::string& v : c1.victims) {
    std::string r1 = slurp(d1 + "/report_" + v + "/results.csv");
    std::string r2 = slurp(d2 + "/report_" + v + "/results.csv");
    CHECK(r1.size() > 0);
    CHECK(r1 == r2);  // byte-identical across fresh runs
  }
  // Cache hit: second invocation must not rewrite the trained model.
  auto stamp = fs::last_write_time(d1 + "/models/model1_cell0.json");
  REQUIRE(run_experiment(c1, false) == 0);
  CHECK(fs::last_write_time(d1 + "/models/model1_cell0.json") == stamp);
  // Deleting a model retrains the training stage and downstream.
  fs::remove(d1 + "/models/model1_cell0.json");
  REQUIRE(run_experiment(c1, false) == 0);
  CHECK(fs::exists(d1 + "/models/model1_cell0.json"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}
