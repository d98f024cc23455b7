#include "soilspec/mlp.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"
#include "soilspec/rng.hpp"

namespace soilspec {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

MlpRegressor::MlpRegressor(const HyperparameterSet& hp, std::uint64_t seed)
    : hp_(hp), seed_(seed) {
  require(hp.kind() == "mlp", "MlpRegressor: wrong hyperparameter kind");
}

void MlpRegressor::initialize(std::size_t input_width) {
  require(input_width > 0, "mlp: zero input width");
  std::vector<std::size_t> widths{input_width};
  for (double h : hp_.get_list("hidden_layers")) widths.push_back(static_cast<std::size_t>(h));
  widths.push_back(1);

  Rng rng(derive_seed(seed_, "mlp-init"));
  layers_.clear();
  for (std::size_t l = 1; l < widths.size(); ++l) {
    Layer layer;
    layer.w = Matrix(widths[l], widths[l - 1]);
    layer.b.assign(widths[l], 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l - 1]));
    for (std::size_t i = 0; i < widths[l]; ++i)
      for (std::size_t j = 0; j < widths[l - 1]; ++j)
        layer.w(i, j) = rng.uniform(-bound, bound);
    layers_.push_back(std::move(layer));
  }
  fitted_width_ = input_width;
}

std::vector<double> MlpRegressor::forward(const double* x,
                                          std::vector<std::vector<double>>* activations) const {
  std::vector<double> a(x, x + fitted_width_);
  if (activations) {
    activations->clear();
    activations->push_back(a);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    std::vector<double> next(layer.b);
    for (std::size_t i = 0; i < layer.w.rows(); ++i)
      next[i] += dot(layer.w.row(i), a.data(), a.size());
    if (l + 1 < layers_.size())
      for (double& v : next) v = std::max(0.0, v);
    a = std::move(next);
    if (activations) activations->push_back(a);
  }
  return a;
}

double MlpRegressor::loss_and_gradients(const Matrix& x, const std::vector<double>& y,
                                        std::vector<Layer>& grads) const {
  grads.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    grads[l].w = Matrix(layers_[l].w.rows(), layers_[l].w.cols());
    grads[l].b.assign(layers_[l].b.size(), 0.0);
  }

  const double inv_n = 1.0 / static_cast<double>(x.rows());
  double loss = 0.0;
  std::vector<std::vector<double>> acts;
  for (std::size_t s = 0; s < x.rows(); ++s) {
    std::vector<double> out = forward(x.row(s), &acts);
    const double err = out[0] - y[s];
    loss += err * err * inv_n;

    // delta for the linear output under mean-squared error
    std::vector<double> delta{2.0 * err * inv_n};
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Layer& layer = layers_[l];
      const std::vector<double>& a_in = acts[l];
      Layer& g = grads[l];
      for (std::size_t i = 0; i < layer.w.rows(); ++i) {
        g.b[i] += delta[i];
        double* grow = g.w.row(i);
        const double di = delta[i];
        for (std::size_t j = 0; j < layer.w.cols(); ++j) grow[j] += di * a_in[j];
      }
      if (l == 0) break;
      std::vector<double> prev(layer.w.cols(), 0.0);
      for (std::size_t i = 0; i < layer.w.rows(); ++i) {
        const double* wrow = layer.w.row(i);
        const double di = delta[i];
        for (std::size_t j = 0; j < layer.w.cols(); ++j) prev[j] += wrow[j] * di;
      }
      // ReLU mask of the layer below (acts[l] are its post-activation values)
      for (std::size_t j = 0; j < prev.size(); ++j)
        if (acts[l][j] <= 0.0) prev[j] = 0.0;
      delta = std::move(prev);
    }
  }
  return loss;
}

void MlpRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  const std::size_t n = x.rows();
  const std::size_t batch_size = static_cast<std::size_t>(hp_.get_int("batch_size"));
  require(n >= batch_size, "fit_mlp: fewer samples than batch_size");
  const long epochs = hp_.get_int("epochs");
  const double lr = hp_.get_double("learning_rate");

  initialize(x.cols());

  std::vector<Layer> m1(layers_.size()), m2(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    m1[l].w = Matrix(layers_[l].w.rows(), layers_[l].w.cols());
    m1[l].b.assign(layers_[l].b.size(), 0.0);
    m2[l].w = Matrix(layers_[l].w.rows(), layers_[l].w.cols());
    m2[l].b.assign(layers_[l].b.size(), 0.0);
  }

  Rng shuffle_rng(derive_seed(seed_, "mlp-shuffle"));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<Layer> grads;
  long step = 0;
  for (long epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.uniform_int(i)]);

    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t len = std::min(batch_size, n - start);
      Matrix bx(len, x.cols());
      std::vector<double> by(len);
      for (std::size_t r = 0; r < len; ++r) {
        const std::size_t src = order[start + r];
        for (std::size_t cidx = 0; cidx < x.cols(); ++cidx) bx(r, cidx) = x(src, cidx);
        by[r] = y[src];
      }

      double loss = loss_and_gradients(bx, by, grads);
      if (!std::isfinite(loss))
        throw Error("fit_mlp: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(start / batch_size) + " (diverged; lower the learning rate)");

      ++step;
      const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t l = 0; l < layers_.size(); ++l) {
        auto update = [&](double& param, double& mv, double& vv, double g) {
          mv = kBeta1 * mv + (1.0 - kBeta1) * g;
          vv = kBeta2 * vv + (1.0 - kBeta2) * g * g;
          param -= lr * (mv / corr1) / (std::sqrt(vv / corr2) + kAdamEps);
        };
        std::vector<double>& w = layers_[l].w.data();
        std::vector<double>& gm = m1[l].w.data();
        std::vector<double>& gv = m2[l].w.data();
        const std::vector<double>& gw = grads[l].w.data();
        const std::size_t count = w.size();
        for (std::size_t t = 0; t < count; ++t) update(w[t], gm[t], gv[t], gw[t]);
        for (std::size_t t = 0; t < layers_[l].b.size(); ++t)
          update(layers_[l].b[t], m1[l].b[t], m2[l].b[t], grads[l].b[t]);
      }
    }
  }
}

std::vector<double> MlpRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = forward(x.row(i), nullptr)[0];
  return out;
}

nlohmann::json MlpRegressor::params_to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& layer : layers_) {
    std::vector<std::vector<double>> w(layer.w.rows());
    for (std::size_t i = 0; i < layer.w.rows(); ++i)
      w[i].assign(layer.w.row(i), layer.w.row(i) + layer.w.cols());
    layers.push_back({{"weights", w}, {"bias", layer.b}});
  }
  return {{"layers", layers}};
}

void MlpRegressor::params_from_json(const nlohmann::json& j) {
  layers_.clear();
  for (const auto& lj : j.at("layers")) {
    auto w = lj.at("weights").get<std::vector<std::vector<double>>>();
    require(!w.empty() && !w[0].empty(), "mlp: empty stored layer");
    Layer layer;
    layer.w = Matrix(w.size(), w[0].size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      require(w[i].size() == layer.w.cols(), "mlp: ragged stored weights");
      for (std::size_t c = 0; c < w[i].size(); ++c) layer.w(i, c) = w[i][c];
    }
    layer.b = lj.at("bias").get<std::vector<double>>();
    require(layer.b.size() == layer.w.rows(), "mlp: bias length mismatch");
    layers_.push_back(std::move(layer));
  }
  require(!layers_.empty(), "mlp: no stored layers");
  fitted_width_ = layers_.front().w.cols();
}

}  // namespace soilspec
