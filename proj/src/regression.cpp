#include "fastsize/regression.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fastsize/error.hpp"

namespace fastsize {

std::string_view to_string(RegressionMode mode) {
  return mode == RegressionMode::power_law ? "power_law" : "gaussian_process";
}

std::optional<RegressionMode> regression_mode_from(std::string_view token) {
  if (token == "power_law") return RegressionMode::power_law;
  if (token == "gaussian_process" || token == "gp") return RegressionMode::gaussian_process;
  return std::nullopt;
}

namespace {

double population_variance(const Eigen::VectorXd& v) {
  double mean = v.mean();
  return (v.array() - mean).square().mean();
}

double squared_exponential(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b,
                           const GpHyperparameters& h) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double d = (a(i) - b(i)) / h.length_scales[static_cast<std::size_t>(i)];
    r2 += d * d;
  }
  return h.signal_variance * std::exp(-0.5 * r2);
}

}  // namespace

std::vector<double> RegressionModel::exponents() const {
  std::vector<double> out;
  for (Eigen::Index i = 1; i < coefficients_.size(); ++i) out.push_back(coefficients_(i));
  return out;
}

Eigen::VectorXd RegressionModel::log_input(std::span<const double> x) const {
  if (x.size() != inputs_.size()) {
    throw RegressionError("expected " + std::to_string(inputs_.size()) + " inputs, got " + std::to_string(x.size()));
  }
  Eigen::VectorXd u(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
      throw RegressionError("input '" + inputs_[i] + "' must be positive, got " + std::to_string(x[i]));
    }
    u(static_cast<Eigen::Index>(i)) = std::log10(x[i]);
  }
  return u;
}

Prediction RegressionModel::predict_log10(std::span<const double> x) const {
  Eigen::VectorXd u = log_input(x);
  if (mode_ == RegressionMode::power_law) {
    return {coefficients_(0) + coefficients_.tail(coefficients_.size() - 1).dot(u), 0.0};
  }
  const Eigen::Index n = train_u_.rows();
  Eigen::VectorXd k_star(n);
  Eigen::RowVectorXd query = u.transpose();
  for (Eigen::Index i = 0; i < n; ++i) k_star(i) = squared_exponential(train_u_.row(i), query, hyper_);
  double mean = hyper_.prior_mean + k_star.dot(alpha_);
  Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k_star);
  double variance = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return {mean, std::sqrt(variance)};
}

Prediction RegressionModel::predict(std::span<const double> x) const {
  Prediction log_space = predict_log10(x);
  double mean = std::pow(10.0, log_space.mean);
  return {mean, std::numbers::ln10 * mean * log_space.std};
}

RegressionModel fit_samples(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                            RegressionMode mode, const GpOverrides& overrides,
                            std::vector<std::string> input_names, std::string output_name,
                            std::vector<std::string> row_labels) {
  if (x.size() != y.size()) throw RegressionError("input and output sample counts differ");
  if (x.empty()) throw RegressionError("insufficient data: no samples");
  const std::size_t d = x.front().size();
  if (d == 0) throw RegressionError("at least one input column is required");
  if (input_names.empty()) {
    for (std::size_t i = 0; i < d; ++i) input_names.push_back("x" + std::to_string(i));
  }
  if (input_names.size() != d) throw RegressionError("input name count does not match input dimension");

  const auto n = static_cast<Eigen::Index>(x.size());
  RegressionModel model;
  model.mode_ = mode;
  model.inputs_ = std::move(input_names);
  model.output_ = std::move(output_name);
  model.row_labels_ = std::move(row_labels);
  model.train_u_.resize(n, static_cast<Eigen::Index>(d));
  model.train_log_y_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = x[static_cast<std::size_t>(i)];
    if (row.size() != d) throw RegressionError("ragged input samples");
    model.train_u_.row(i) = model.log_input(row).transpose();
    double yi = y[static_cast<std::size_t>(i)];
    if (!(yi > 0.0) || !std::isfinite(yi)) throw RegressionError("training outputs must be positive");
    model.train_log_y_(i) = std::log10(yi);
  }

  if (mode == RegressionMode::power_law) {
    if (n < static_cast<Eigen::Index>(d) + 1) {
      throw RegressionError("insufficient data: power_law with " + std::to_string(d) + " inputs needs at least " +
                            std::to_string(d + 1) + " rows, got " + std::to_string(n));
    }
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(d) + 1);
    design.col(0).setOnes();
    design.rightCols(static_cast<Eigen::Index>(d)) = model.train_u_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) throw RegressionError("singular system: collinear inputs");
    model.coefficients_ = qr.solve(model.train_log_y_);
    return model;
  }

  GpHyperparameters& h = model.hyper_;
  h.length_scales.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    double sd = std::sqrt(population_variance(model.train_u_.col(static_cast<Eigen::Index>(i))));
    h.length_scales[i] = sd > 0.0 ? sd : 1.0;
  }
  double sf2 = population_variance(model.train_log_y_);
  h.signal_variance = sf2 > 0.0 ? sf2 : 1.0;
  h.noise_variance = 1e-6 * h.signal_variance;
  h.prior_mean = model.train_log_y_.mean();
  if (overrides.length_scales) {
    if (overrides.length_scales->size() != d) throw RegressionError("length scale count does not match inputs");
    h.length_scales = *overrides.length_scales;
  }
  if (overrides.signal_variance) h.signal_variance = *overrides.signal_variance;
  if (overrides.noise_variance) h.noise_variance = *overrides.noise_variance;
  if (overrides.prior_mean) h.prior_mean = *overrides.prior_mean;
  for (double l : h.length_scales) {
    if (!(l > 0.0)) throw RegressionError("length scales must be > 0");
  }
  if (!(h.signal_variance > 0.0)) throw RegressionError("signal variance must be > 0");
  if (!(h.noise_variance >= 0.0)) throw RegressionError("noise variance must be >= 0");

  Eigen::MatrixXd kernel(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double k = squared_exponential(model.train_u_.row(i), model.train_u_.row(j), h);
      kernel(i, j) = k;
      kernel(j, i) = k;
    }
  }
  kernel.diagonal().array() += h.noise_variance;

  // Retry with growing diagonal jitter: 1e-10, 1e-9, 1e-8.
  Eigen::LLT<Eigen::MatrixXd> llt(kernel);
  double jitter = 1e-10;
  while (llt.info() != Eigen::Success && jitter <= 1e-8 * (1 + 1e-9)) {
    Eigen::MatrixXd jittered = kernel;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) model.jitter_ = jitter;
    jitter *= 10.0;
  }
  if (llt.info() != Eigen::Success) {
    throw RegressionError("singular system: kernel matrix not positive definite (duplicate or collinear inputs)");
  }
  model.chol_lower_ = llt.matrixL();
  model.alpha_ = llt.solve((model.train_log_y_.array() - h.prior_mean).matrix());
  return model;
}

RegressionModel fit(const DataTable& table, const std::vector<std::string>& inputs, const std::string& output,
                    RegressionMode mode, const GpOverrides& overrides) {
  for (const auto& c : inputs) {
    if (!table.has_column(c)) throw RegressionError("unknown column '" + c + "'");
  }
  if (!table.has_column(output)) throw RegressionError("unknown column '" + output + "'");

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<std::string> labels;
  for (const auto& rec : table.records) {
    std::vector<double> row;
    bool usable = true;
    for (const auto& c : inputs) {
      auto v = rec.get(c);
      if (!v || !(*v > 0.0)) {
        usable = false;
        break;
      }
      row.push_back(*v);
    }
    auto out = rec.get(output);
    if (!usable || !out || !(*out > 0.0)) continue;
    x.push_back(std::move(row));
    y.push_back(*out);
    labels.push_back(rec.label());
  }
  if (x.size() < 3) {
    throw RegressionError("insufficient data: " + std::to_string(x.size()) + " usable rows for " + output +
                          " (at least 3 required)");
  }
  return fit_samples(x, y, mode, overrides, inputs, output, std::move(labels));
}

namespace {

std::string format_number(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

FillResult fill_unknowns(const AircraftSpec& spec, const HistoricalDatabase& db) {
  FillResult result{spec, {}};
  for (const auto& field : spec.missing_fields()) {
    if (field != "empty_weight_fraction") throw RegressionError("no regression available for " + field);
  }
  if (spec.empty_weight_fraction) return result;

  const std::string cls = spec.power_to_weight ? "turboprop" : "turbofan";
  DataTable rows = db.aircraft.filtered_by_type(cls);
  RegressionModel mtow_model;
  RegressionModel oew_model;
  try {
    mtow_model = fit(rows, {"payload_kg", "range_m"}, "mtow_kg", RegressionMode::gaussian_process);
    oew_model = fit(rows, {"mtow_kg"}, "empty_mass_kg", RegressionMode::gaussian_process);
  } catch (const RegressionError& e) {
    throw RegressionError("no regression available for empty_weight_fraction (" + cls + " rows): " + e.what());
  }
  if (!(spec.payload_mass > 0.0)) {
    throw RegressionError("no regression available for empty_weight_fraction: payload_mass must be > 0");
  }
  const double mtow_class = mtow_model.predict(std::vector{spec.payload_mass, spec.design_range}).mean;
  const Prediction oew = oew_model.predict(std::vector{mtow_class});
  const double fraction = oew.mean / mtow_class;
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw RegressionError("regressed empty_weight_fraction " + format_number(fraction) + " is outside (0, 1)");
  }
  result.spec.empty_weight_fraction = fraction;
  result.report.push_back({"empty_weight_fraction", fraction, oew.std / mtow_class, oew_model.rows_used(),
                           "GP empty_mass_kg(mtow_kg) / mtow at MTOW class " + format_number(mtow_class) +
                               " kg from GP mtow_kg(payload_kg, range_m), " + cls + " rows"});
  return result;
}

FillEntry regress_turbine_specific_power(const HistoricalDatabase& db, double rated_power_w) {
  DataTable rows = db.engines.filtered_by_type("turboprop");
  RegressionModel model = fit(rows, {"rated_power_w"}, "dry_mass_kg", RegressionMode::gaussian_process);
  Prediction mass = model.predict(std::vector{rated_power_w});
  double sp = rated_power_w / mass.mean;
  return {"specific_power", sp, sp * mass.std / mass.mean, model.rows_used(),
          "rated power / GP dry_mass_kg(rated_power_w) at " + format_number(rated_power_w) + " W, turboprop rows"};
}

}  // namespace fastsize
