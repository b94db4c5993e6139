#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "output.hpp"
#include "spinchain/fidelity.hpp"

namespace spinchain::cli {

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::vector<double> points() const;
};

struct RunConfig {
  std::vector<int> n_list;
  std::vector<int> k_list;
  std::vector<int> r_list;
  double coupling = 1.0;
  double theta = 0.0;
  bool theta_set = false;
  double phi = 0.0;
  double field = 0.0;
  std::optional<double> fixed_time;
  double t0 = 0.0;
  double j_kelvin = 0.0;
  std::optional<std::pair<double, double>> window;
  std::optional<Grid> grid;
  Variant variant = Variant::CanonicalEq6;
  bool variant_set = false;
  std::string out_path;
  std::string format = "csv";
  std::string enc_file;
  int workers = 0;  // 0 selects the hardware concurrency
};

Table cmd_table1(const RunConfig& cfg);
Table cmd_table2(const RunConfig& cfg);
Table cmd_scaling(const RunConfig& cfg);
Table cmd_field_sweep(const RunConfig& cfg);
Table cmd_theta_sweep(const RunConfig& cfg);
Table cmd_avg(const RunConfig& cfg);
Table cmd_peak(const RunConfig& cfg);
std::string cmd_encode(const RunConfig& cfg);
Table cmd_phys_time(const RunConfig& cfg);

/// t0 (units hbar/J) to seconds for an exchange constant given in Kelvin:
/// t = t0 * hbar / (k_B * J). Note the published 1.12 us example for
/// (N2H5)CuCl3 does not follow from this formula; see the README.
double to_physical_time(double t0, double j_in_kelvin);

}  // namespace spinchain::cli
