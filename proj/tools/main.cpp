#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "output.hpp"
#include "spinchain/optimizer.hpp"
#include "spinchain/version.hpp"

namespace {

using spinchain::cli::Grid;
using spinchain::cli::RunConfig;

std::pair<double, double> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--window expects lo:hi");
  }
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    return {lo, hi};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--window expects numeric lo:hi");
  }
}

Grid parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw CLI::ValidationError("--grid expects lo:hi:step");
  }
  try {
    Grid grid;
    grid.lo = std::stod(text.substr(0, first));
    grid.hi = std::stod(text.substr(first + 1, second - first - 1));
    grid.step = std::stod(text.substr(second + 1));
    return grid;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid expects numeric lo:hi:step");
  }
}

// Innermost recognizable cause decides the exit code: 2 invalid arguments,
// 3 numerical assertion, 4 I/O.
int classify_exception(const std::exception& e) {
  int inner = 0;
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& nested) {
    inner = classify_exception(nested);
  } catch (...) {
  }
  if (inner != 0) return inner;
  if (dynamic_cast<const spinchain::numerical_error*>(&e)) return 3;
  if (dynamic_cast<const spinchain::cli::io_error*>(&e)) return 4;
  if (dynamic_cast<const std::ios_base::failure*>(&e)) return 4;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  return 0;
}

void print_exception(const std::exception& e, int depth = 0) {
  std::cerr << (depth ? "  caused by: " : "error: ") << e.what() << "\n";
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& nested) {
    print_exception(nested, depth + 1);
  } catch (...) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spinchain " SPINCHAIN_VERSION
      " - state-transfer fidelities over uniform XY chains"};
  // --h is the magnetic field, so help is long-form only.
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string window_text, grid_text, variant_text;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--n", cfg.n_list, "chain length(s)")->delimiter(',');
    cmd->add_option("--k", cfg.k_list, "encoding order(s) k")->delimiter(',');
    cmd->add_option("--r", cfg.r_list, "sender/receiver region size(s)")
        ->delimiter(',');
    cmd->add_option("--coupling", cfg.coupling,
                    "exchange coupling J (energy units, default 1)");
    cmd->add_option("--theta", cfg.theta, "Bloch polar angle in [0, pi]")
        ->check(CLI::Range(0.0, 3.14159265358979323846))
        ->each([&](const std::string&) { cfg.theta_set = true; });
    cmd->add_option("--phi", cfg.phi, "Bloch azimuthal angle in [0, 2pi)");
    cmd->add_option("--h", cfg.field, "magnetic field");
    cmd->add_option("--t", [&cfg](const std::vector<std::string>& vals) {
          try {
            std::size_t used = 0;
            const double value = std::stod(vals.back(), &used);
            if (used != vals.back().size()) return false;
            cfg.fixed_time = value;
            return true;
          } catch (const std::exception&) {
            return false;
          }
        },
        "fixed evaluation time (default: the psi_k arrival peak)");
    cmd->add_option("--window", window_text, "search window lo:hi");
    cmd->add_option("--grid", grid_text, "sweep grid lo:hi:step");
    cmd->add_option("--variant", variant_text, "fidelity variant")
        ->check(CLI::IsMember({"eq6", "eq8"}));
    cmd->add_option("--out", cfg.out_path, "output path (default stdout)");
    cmd->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", cfg.workers,
                    "worker threads (default: hardware)");
    cmd->add_option("--enc-file", cfg.enc_file, "encoding JSON file");
    return cmd;
  };

  add_common(app.add_subcommand(
      "table1", "peak fidelity and arrival time per (k, N) cell"));
  add_common(app.add_subcommand(
      "table2", "optimal-encoding comparison per (r, N) cell"));
  add_common(app.add_subcommand(
      "scaling", "peak fidelity as a function of chain length"));
  add_common(app.add_subcommand(
      "field-sweep", "fidelity of the encoded qubit versus magnetic field"));
  add_common(app.add_subcommand(
      "theta-sweep", "fidelity of the encoded qubit versus Bloch angle"));
  add_common(app.add_subcommand(
      "avg", "Bloch-sphere average fidelity at the optimal field"));
  add_common(app.add_subcommand(
      "peak", "peak search for one encoding"));
  add_common(app.add_subcommand(
      "encode", "write an encoding as JSON"));
  auto* phys = app.add_subcommand(
      "phys-time", "convert an arrival time to seconds");
  phys->add_option("--t0", cfg.t0, "arrival time in units hbar/J")
      ->required();
  phys->add_option("--j-kelvin", cfg.j_kelvin,
                   "exchange constant in Kelvin")
      ->required();
  phys->add_option("--out", cfg.out_path, "output path (default stdout)");
  phys->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!window_text.empty()) cfg.window = parse_window(window_text);
    if (!grid_text.empty()) cfg.grid = parse_grid(grid_text);
    if (!variant_text.empty()) {
      cfg.variant = variant_text == "eq8" ? spinchain::Variant::PrintedEq8
                                          : spinchain::Variant::CanonicalEq6;
      cfg.variant_set = true;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::string payload;
    if (command == "encode") {
      payload = spinchain::cli::cmd_encode(cfg);
    } else {
      spinchain::cli::Table table;
      if (command == "table1") table = spinchain::cli::cmd_table1(cfg);
      else if (command == "table2") table = spinchain::cli::cmd_table2(cfg);
      else if (command == "scaling") table = spinchain::cli::cmd_scaling(cfg);
      else if (command == "field-sweep")
        table = spinchain::cli::cmd_field_sweep(cfg);
      else if (command == "theta-sweep")
        table = spinchain::cli::cmd_theta_sweep(cfg);
      else if (command == "avg") table = spinchain::cli::cmd_avg(cfg);
      else if (command == "peak") table = spinchain::cli::cmd_peak(cfg);
      else if (command == "phys-time")
        table = spinchain::cli::cmd_phys_time(cfg);
      payload = cfg.format == "json" ? spinchain::cli::to_json(table)
                                     : spinchain::cli::to_csv(table);
    }
    spinchain::cli::write_output(cfg.out_path, payload);
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    print_exception(e);
    const int code = classify_exception(e);
    return code == 0 ? 1 : code;
  }
}
