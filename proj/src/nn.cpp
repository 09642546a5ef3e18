#include "mamimo/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace mamimo {

std::string to_string(Act a) { return a == Act::ELU ? "elu" : "linear"; }

Act act_from_string(const std::string& s) {
  if (s == "elu") return Act::ELU;
  if (s == "linear") return Act::Linear;
  throw std::invalid_argument("unknown activation: " + s);
}

void MlpModel::validate() const {
  if (layers.empty()) throw std::invalid_argument("model has no layers");
  for (size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.W.rows() != l.b.size()) throw std::invalid_argument("bias/weight row mismatch");
    if (i > 0 && l.W.cols() != layers[i - 1].W.rows())
      throw std::invalid_argument("layer dimension chain broken");
    if (!l.W.allFinite() || !l.b.allFinite())
      throw std::invalid_argument("non-finite parameters");
  }
}

MlpModel build_mlp(const std::vector<int>& dims, const std::vector<Act>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw std::invalid_argument("build_mlp: dims/acts size mismatch");
  MlpModel m;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    int fan_in = dims[i], fan_out = dims[i + 1];
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    Layer l;
    l.W.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) l.W(r, c) = u(rng);
    l.b = Eigen::VectorXd::Zero(fan_out);
    l.act = acts[i];
    m.layers.push_back(std::move(l));
  }
  return m;
}

MlpModel build_model1(int ues_per_cell, int cells, Rng& rng) {
  int in = 2 * ues_per_cell * cells;
  std::vector<int> dims = {in, 256, 128, 64, 64, ues_per_cell, ues_per_cell + 1};
  std::vector<Act> acts(dims.size() - 1, Act::ELU);
  acts.back() = Act::Linear;
  return build_mlp(dims, acts, rng);
}

MlpModel build_model2(int ues_per_cell, int cells, Rng& rng) {
  int in = 2 * ues_per_cell * cells;
  std::vector<int> dims = {in, 512, 256, 128, 128, ues_per_cell, ues_per_cell + 1};
  std::vector<Act> acts(dims.size() - 1, Act::ELU);
  acts.back() = Act::Linear;
  return build_mlp(dims, acts, rng);
}

MlpModel build_dae(int ues_per_cell, int cells, Rng& rng) {
  int in = 2 * ues_per_cell * cells;
  std::vector<int> dims = {in, 32, 16, 32, in};
  std::vector<Act> acts(dims.size() - 1, Act::Linear);
  return build_mlp(dims, acts, rng);
}

double elu(double t) { return t >= 0.0 ? t : std::exp(t) - 1.0; }
double elu_deriv(double t) { return t >= 0.0 ? 1.0 : std::exp(t); }

namespace {

void apply_act(Act a, Eigen::MatrixXd& z) {
  if (a == Act::ELU) z = z.unaryExpr([](double t) { return elu(t); });
}

Eigen::MatrixXd act_deriv(Act a, const Eigen::MatrixXd& z) {
  if (a == Act::Linear) return Eigen::MatrixXd::Ones(z.rows(), z.cols());
  return z.unaryExpr([](double t) { return elu_deriv(t); });
}

struct Trace {
  std::vector<Eigen::MatrixXd> z;  // pre-activation per layer
  std::vector<Eigen::MatrixXd> o;  // post-activation; o[0] is the input
};

Eigen::MatrixXd forward_traced(const MlpModel& m, const Eigen::MatrixXd& X, Trace& tr) {
  tr.z.clear();
  tr.o.clear();
  tr.o.push_back(X);
  Eigen::MatrixXd cur = X;
  for (const Layer& l : m.layers) {
    Eigen::MatrixXd z = (l.W * cur).colwise() + l.b;
    tr.z.push_back(z);
    apply_act(l.act, z);
    tr.o.push_back(z);
    cur = std::move(z);
  }
  return cur;
}

// dL/dpred for the batch-mean losses.
Eigen::MatrixXd loss_grad(LossKind kind, const Eigen::MatrixXd& pred,
                          const Eigen::MatrixXd& label, double rel_floor) {
  double count = static_cast<double>(pred.size());
  if (kind == LossKind::Mse) return 2.0 * (pred - label) / count;
  Eigen::MatrixXd d = label.cwiseAbs().cwiseMax(rel_floor);
  return 2.0 * (pred - label).cwiseQuotient(d.cwiseProduct(d)) / count;
}

}  // namespace

Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& X) {
  if (X.rows() != m.input_dim()) throw std::invalid_argument("forward: input dimension mismatch");
  Eigen::MatrixXd cur = X;
  for (const Layer& l : m.layers) {
    Eigen::MatrixXd z = (l.W * cur).colwise() + l.b;
    apply_act(l.act, z);
    cur = std::move(z);
  }
  return cur;
}

Eigen::VectorXd forward(const MlpModel& m, const Eigen::VectorXd& x) {
  return forward_batch(m, x);
}

double loss_value(LossKind kind, const Eigen::MatrixXd& pred, const Eigen::MatrixXd& label,
                  double rel_floor) {
  if (kind == LossKind::Mse) return (pred - label).array().square().mean();
  Eigen::MatrixXd d = label.cwiseAbs().cwiseMax(rel_floor);
  return (pred - label).cwiseQuotient(d).array().square().mean();
}

ParamGrads grad_params(const MlpModel& m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       LossKind kind, double rel_floor) {
  Trace tr;
  Eigen::MatrixXd pred = forward_traced(m, X, tr);
  Eigen::MatrixXd delta = loss_grad(kind, pred, Y, rel_floor);

  ParamGrads g;
  const int n = static_cast<int>(m.layers.size());
  g.dW.resize(n);
  g.db.resize(n);
  for (int i = n - 1; i >= 0; --i) {
    delta = delta.cwiseProduct(act_deriv(m.layers[i].act, tr.z[i]));
    g.dW[i] = delta * tr.o[i].transpose();
    g.db[i] = delta.rowwise().sum();
    if (i > 0) delta = (m.layers[i].W.transpose() * delta).eval();
  }
  return g;
}

Eigen::MatrixXd grad_input_batch(const MlpModel& m, const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& head) {
  if (head.size() != m.output_dim())
    throw std::invalid_argument("grad_input: head dimension mismatch");
  Trace tr;
  forward_traced(m, X, tr);
  Eigen::MatrixXd delta = head.replicate(1, X.cols());
  for (int i = static_cast<int>(m.layers.size()) - 1; i >= 0; --i) {
    delta = delta.cwiseProduct(act_deriv(m.layers[i].act, tr.z[i]));
    delta = (m.layers[i].W.transpose() * delta).eval();
  }
  return delta;
}

Eigen::VectorXd grad_input(const MlpModel& m, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& head) {
  return grad_input_batch(m, x, head);
}

void TrainConfig::validate() const {
  if (!(lr_floor > 0.0 && lr_floor <= lr_init))
    throw std::invalid_argument("require 0 < lr_floor <= lr_init");
  if (!(lr_decay > 0.0 && lr_decay < 1.0)) throw std::invalid_argument("require 0 < lr_decay < 1");
  if (batch_size < 1 || max_epochs < 1 || plateau_patience < 1)
    throw std::invalid_argument("batch_size, max_epochs, plateau_patience must be >= 1");
  if (grad_clip < 0.0) throw std::invalid_argument("grad_clip must be >= 0");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must be in [0, 1)");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"lr_init", c.lr_init},
                     {"lr_floor", c.lr_floor},
                     {"lr_decay", c.lr_decay},
                     {"plateau_patience", c.plateau_patience},
                     {"plateau_min_delta", c.plateau_min_delta},
                     {"batch_size", c.batch_size},
                     {"max_epochs", c.max_epochs},
                     {"seed", c.seed},
                     {"rel_floor", c.rel_floor},
                     {"grad_clip", c.grad_clip},
                     {"momentum", c.momentum}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.lr_init = j.value("lr_init", d.lr_init);
  c.lr_floor = j.value("lr_floor", d.lr_floor);
  c.lr_decay = j.value("lr_decay", d.lr_decay);
  c.plateau_patience = j.value("plateau_patience", d.plateau_patience);
  c.plateau_min_delta = j.value("plateau_min_delta", d.plateau_min_delta);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.max_epochs = j.value("max_epochs", d.max_epochs);
  c.seed = j.value("seed", d.seed);
  c.rel_floor = j.value("rel_floor", d.rel_floor);
  c.grad_clip = j.value("grad_clip", d.grad_clip);
  c.momentum = j.value("momentum", d.momentum);
  c.validate();
}

TrainHistory train(MlpModel& m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                   const Eigen::MatrixXd& Xval, const Eigen::MatrixXd& Yval,
                   const TrainConfig& cfg, LossKind kind) {
  cfg.validate();
  const int n = static_cast<int>(X.cols());
  if (n == 0 || Xval.cols() == 0) throw std::invalid_argument("train: empty train or val set");

  Rng rng = make_rng(cfg.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  double lr = cfg.lr_init;
  std::vector<Eigen::MatrixXd> vW;
  std::vector<Eigen::VectorXd> vb;
  for (const Layer& l : m.layers) {
    vW.push_back(Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()));
    vb.push_back(Eigen::VectorXd::Zero(l.b.size()));
  }
  double best_val = std::numeric_limits<double>::infinity();
  int stall = 0;
  bool at_floor = false;
  TrainHistory hist;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_loss_acc = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      int bs = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd xb(X.rows(), bs), yb(Y.rows(), bs);
      for (int c = 0; c < bs; ++c) {
        xb.col(c) = X.col(order[start + c]);
        yb.col(c) = Y.col(order[start + c]);
      }
      train_loss_acc += loss_value(kind, forward_batch(m, xb), yb, cfg.rel_floor);
      ++batches;
      ParamGrads g = grad_params(m, xb, yb, kind, cfg.rel_floor);
      if (cfg.grad_clip > 0.0) {
        double sq = 0.0;
        for (size_t i = 0; i < g.dW.size(); ++i)
          sq += g.dW[i].squaredNorm() + g.db[i].squaredNorm();
        double norm = std::sqrt(sq);
        if (norm > cfg.grad_clip) {
          double s = cfg.grad_clip / norm;
          for (size_t i = 0; i < g.dW.size(); ++i) {
            g.dW[i] *= s;
            g.db[i] *= s;
          }
        }
      }
      for (size_t i = 0; i < m.layers.size(); ++i) {
        vW[i] = cfg.momentum * vW[i] + g.dW[i];
        vb[i] = cfg.momentum * vb[i] + g.db[i];
        m.layers[i].W.noalias() -= lr * vW[i];
        m.layers[i].b.noalias() -= lr * vb[i];
      }
    }
    double val_loss = loss_value(kind, forward_batch(m, Xval), Yval, cfg.rel_floor);
    if (!std::isfinite(val_loss))
      throw TrainingDiverged("train: validation loss is not finite at epoch " +
                             std::to_string(epoch));
    hist.epochs.push_back({epoch, train_loss_acc / batches, val_loss, lr});

    if (val_loss < best_val * (1.0 - cfg.plateau_min_delta)) {
      best_val = val_loss;
      stall = 0;
    } else {
      if (++stall >= cfg.plateau_patience) {
        if (at_floor) break;  // plateau persists with lr at the floor
        lr = std::max(lr * cfg.lr_decay, cfg.lr_floor);
        at_floor = (lr <= cfg.lr_floor);
        stall = 0;
      }
    }
  }
  return hist;
}

nlohmann::json model_to_json(const MlpModel& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : m.layers) {
    std::vector<double> w, b;
    w.reserve(l.W.size());
    for (int r = 0; r < l.W.rows(); ++r)
      for (int c = 0; c < l.W.cols(); ++c) w.push_back(l.W(r, c));
    for (int r = 0; r < l.b.size(); ++r) b.push_back(l.b(r));
    layers.push_back({{"out", l.W.rows()},
                      {"in", l.W.cols()},
                      {"activation", to_string(l.act)},
                      {"weights", w},
                      {"biases", b}});
  }
  return nlohmann::json{{"layers", layers}};
}

MlpModel model_from_json(const nlohmann::json& j) {
  MlpModel m;
  for (const auto& lj : j.at("layers")) {
    Layer l;
    int out = lj.at("out").get<int>();
    int in = lj.at("in").get<int>();
    auto w = lj.at("weights").get<std::vector<double>>();
    auto b = lj.at("biases").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != out * in || static_cast<int>(b.size()) != out)
      throw std::runtime_error("model json: parameter array size mismatch");
    l.W.resize(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) l.W(r, c) = w[r * in + c];
    l.b = Eigen::Map<Eigen::VectorXd>(b.data(), out);
    l.act = act_from_string(lj.at("activation").get<std::string>());
    m.layers.push_back(std::move(l));
  }
  m.validate();
  return m;
}

void save_model(const MlpModel& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << model_to_json(m).dump();
}

MlpModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  nlohmann::json j;
  f >> j;
  return model_from_json(j);
}

void save_history(const TrainHistory& h, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << "epoch,train_loss,val_loss,lr\n";
  f.precision(17);
  for (const EpochRecord& e : h.epochs)
    f << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.lr << '\n';
}

}  // namespace mamimo
