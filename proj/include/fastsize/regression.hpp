#pragma once
// Regressions over the historical database, used to fill design parameters
// the user does not know.
//
// Both modes work in log10 space of inputs and output, since aircraft scaling
// relations are multiplicative:
//
//   power_law         log10 y = a + sum_i b_i log10 x_i   (ordinary least squares)
//   gaussian_process  squared-exponential kernel on u = log10 x,
//                     k(u, u') = sf2 exp(-1/2 sum_i ((u_i - u'_i) / l_i)^2)
//
// GP hyperparameters are fixed by heuristic, not optimized: l_i is the
// standard deviation of the i-th log input, sf2 the variance of the log
// outputs, sn2 = 1e-6 sf2, and the prior mean is the mean log output (the
// geometric mean of the training outputs).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fastsize/database.hpp"
#include "fastsize/model.hpp"

namespace fastsize {

enum class RegressionMode { power_law, gaussian_process };

std::string_view to_string(RegressionMode mode);
std::optional<RegressionMode> regression_mode_from(std::string_view token);

struct GpHyperparameters {
  std::vector<double> length_scales;
  double signal_variance = 1.0;
  double noise_variance = 0.0;
  double prior_mean = 0.0;  // log10 space
};

// Replaces individual heuristic hyperparameters.
struct GpOverrides {
  std::optional<std::vector<double>> length_scales;
  std::optional<double> signal_variance;
  std::optional<double> noise_variance;
  std::optional<double> prior_mean;
};

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

class RegressionModel {
 public:
  RegressionMode mode() const { return mode_; }
  const std::vector<std::string>& input_columns() const { return inputs_; }
  const std::string& output_column() const { return output_; }
  int rows_used() const { return static_cast<int>(train_log_y_.size()); }
  const std::vector<std::string>& row_labels() const { return row_labels_; }

  // power_law only.
  double intercept() const { return coefficients_(0); }
  std::vector<double> exponents() const;

  // gaussian_process only.
  const GpHyperparameters& hyperparameters() const { return hyper_; }
  // Jitter that had to be added to the kernel diagonal (0 when none).
  double jitter() const { return jitter_; }

  // Mean and standard deviation in the output's linear units. The GP std is
  // mapped from log space with the first-order delta rule; power_law std = 0.
  // Throws RegressionError for non-positive or wrongly sized input.
  Prediction predict(std::span<const double> x) const;
  // Posterior mean and standard deviation of log10 y.
  Prediction predict_log10(std::span<const double> x) const;

 private:
  friend RegressionModel fit_samples(const std::vector<std::vector<double>>&, const std::vector<double>&,
                                     RegressionMode, const GpOverrides&, std::vector<std::string>,
                                     std::string, std::vector<std::string>);

  Eigen::VectorXd log_input(std::span<const double> x) const;

  RegressionMode mode_ = RegressionMode::power_law;
  std::vector<std::string> inputs_;
  std::string output_;
  std::vector<std::string> row_labels_;
  Eigen::VectorXd coefficients_;  // power_law: [a, b_1..b_d]
  GpHyperparameters hyper_;
  Eigen::MatrixXd train_u_;  // n x d
  Eigen::VectorXd train_log_y_;
  Eigen::VectorXd alpha_;        // K^-1 (y' - m0)
  Eigen::MatrixXd chol_lower_;   // L with K = L L^T
  double jitter_ = 0.0;
};

// Fits on explicit samples; x[i] is the i-th input vector. Inputs and outputs
// must be strictly positive. The GP mode accepts a single sample; power_law
// needs at least d + 1.
RegressionModel fit_samples(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                            RegressionMode mode, const GpOverrides& overrides = {},
                            std::vector<std::string> input_names = {}, std::string output_name = "y",
                            std::vector<std::string> row_labels = {});

// Fits on the rows of a table where every named column is present and
// positive. Requires at least 3 such rows.
RegressionModel fit(const DataTable& table, const std::vector<std::string>& inputs, const std::string& output,
                    RegressionMode mode, const GpOverrides& overrides = {});

struct FillEntry {
  std::string field;
  double value = 0.0;
  double std = 0.0;
  int rows_used = 0;
  std::string method;
};

struct FillResult {
  AircraftSpec spec;
  std::vector<FillEntry> report;
};

// Completes the spec's regressable unknowns from the database. Currently the
// empty-weight fraction is the only one: an MTOW class is predicted from
// payload and design range, then operating empty mass at that MTOW, both by
// GP over aircraft of the same propulsion class (turboprop when the spec is
// power-rated, turbofan when thrust-rated). Any other missing field raises
// RegressionError "no regression available for <field>".
FillResult fill_unknowns(const AircraftSpec& spec, const HistoricalDatabase& db);

// Gas-turbine specific power (W/kg) at a rated shaft power, from the engine
// table's turboprop rows.
FillEntry regress_turbine_specific_power(const HistoricalDatabase& db, double rated_power_w);

}  // namespace fastsize
