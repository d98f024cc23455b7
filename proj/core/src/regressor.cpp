#include "soilspec/regressor.hpp"

#include "soilspec/error.hpp"

namespace soilspec {

std::vector<double> Regressor::feature_importance() const {
  throw Error("model '" + kind() + "' does not provide feature importances");
}

void Regressor::check_fit_inputs(const Matrix& x, const std::vector<double>& y) {
  require(x.rows() > 0, "fit: empty training set");
  require(x.cols() > 0, "fit: zero feature columns");
  require(x.rows() == y.size(), "fit: feature rows and target length differ");
  fitted_width_ = x.cols();
}

void Regressor::check_predict_input(const Matrix& x) const {
  require(fitted(), "predict: model has not been fitted");
  require(x.cols() == fitted_width_,
          "predict: expected " + std::to_string(fitted_width_) + " features, got " +
              std::to_string(x.cols()));
}

}  // namespace soilspec
