#pragma once

#include <optional>
#include <vector>

#include "ampcap/audit.hpp"
#include "ampcap/common.hpp"
#include "ampcap/geometry.hpp"
#include "ampcap/oracle.hpp"

namespace ampcap {

/// Flat key=value sweep configuration; see README for the key set.
struct SweepConfig {
  Eigen::MatrixXd channel;
  bool constraint_is_box = true;
  Eigen::VectorXd box_profile;  // per-antenna relative halfwidths, default ones
  std::vector<double> amplitudes;  // linear grid
  bool grid_in_db = false;
  double db_start = 0.0;
  double db_stop = 0.0;
  int db_points = 0;
  std::string db_convention = "half-range";  // "half-range" | "linear"
  std::vector<std::string> bounds;
  std::int64_t samples = 200000;
  std::uint64_t seed = 1;
  std::string out;
  std::string preset;

  // mi subcommand
  std::string input_kind;  // "pam" | "point"
  std::vector<int> pam_points;
  std::vector<double> pam_amplitudes;
  Eigen::VectorXd point;

  // audit subcommand
  std::string ensemble = "default";  // "default" | "fig2" | "fig3"
  std::optional<double> pam_gap_constant_override;  // test hook
};

SweepConfig parse_config_text(const std::string& text);
SweepConfig parse_config_file(const std::string& path);
SweepConfig fig2_preset();
SweepConfig fig3_preset();

double db_to_linear(double db, const std::string& convention);
double linear_to_db(double a, const std::string& convention);

struct SweepRow {
  double amplitude_linear = 0.0;
  double amplitude_db = 0.0;
  std::string bound;
  BoundKind kind = BoundKind::Upper;
  double bits = 0.0;
  std::string note;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::string convention;
};

/// Evaluates the selected bounds on the amplitude grid, parallel across grid
/// points; row order and content are independent of the worker count.
SweepTable run_sweep(const SweepConfig& cfg, int workers = 0);
std::string sweep_to_csv(const SweepTable& table);

struct AuditOutput {
  std::vector<GapCertificate> certificates;
  bool all_pass = true;
  std::string csv;
  std::string report;
};

AuditOutput run_audit(const SweepConfig& cfg, int workers = 0);

McEstimate run_mi_estimate(const SweepConfig& cfg, int workers = 0);
std::string mi_to_csv(const McEstimate& est);

const std::vector<std::string>& known_bound_names();
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ampcap
