#include "ampcap/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ampcap/lower_bounds.hpp"
#include "ampcap/parallel.hpp"
#include "ampcap/svd_precoding.hpp"
#include "ampcap/upper_bounds.hpp"

namespace ampcap {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& key, int lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("config line " + std::to_string(lineno) + ": bad numeric value for '" +
                       key + "': " + s);
  }
}

}  // namespace

double db_to_linear(double db, const std::string& convention) {
  if (convention == "half-range") return std::pow(10.0, db / 10.0) / 2.0;
  if (convention == "linear") return std::pow(10.0, db / 10.0);
  throw config_error("unknown dB convention: " + convention);
}

double linear_to_db(double a, const std::string& convention) {
  if (convention == "half-range") return 10.0 * std::log10(2.0 * a);
  if (convention == "linear") return 10.0 * std::log10(a);
  throw config_error("unknown dB convention: " + convention);
}

const std::vector<std::string>& known_bound_names() {
  static const std::vector<std::string> names = {
      "moment",     "moment_p2",      "dual1_ball",    "dual2_box",
      "dual2_box_svd", "dual2_diag_ball_paper", "epi", "epi_paper_vol",
      "epi_svd",    "epi_svd_paper",  "jensen_diag",   "jensen_svd",
      "ow_pam",     "jensen_mc"};
  return names;
}

SweepConfig parse_config_text(const std::string& text) {
  SweepConfig cfg;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");

    if (key == "preset") {
      if (value == "fig2")
        cfg = fig2_preset();
      else if (value == "fig3")
        cfg = fig3_preset();
      else
        throw config_error("config line " + std::to_string(lineno) + ": unknown preset " + value);
      cfg.preset = value;
    } else if (key == "channel") {
      cfg.channel = parse_matrix_text(value);
    } else if (key == "channel_csv") {
      std::ifstream in(value);
      if (!in) throw config_error("config line " + std::to_string(lineno) +
                                  ": cannot open channel CSV " + value);
      std::ostringstream ss;
      ss << in.rdbuf();
      cfg.channel = parse_matrix_text(ss.str());
    } else if (key == "constraint") {
      if (value == "box")
        cfg.constraint_is_box = true;
      else if (value == "ball")
        cfg.constraint_is_box = false;
      else
        throw config_error("config line " + std::to_string(lineno) +
                           ": constraint must be box or ball");
    } else if (key == "box_profile") {
      const auto toks = split_list(value);
      cfg.box_profile.resize(toks.size());
      for (std::size_t i = 0; i < toks.size(); ++i)
        cfg.box_profile(i) = parse_double(toks[i], key, lineno);
    } else if (key == "amplitudes") {
      cfg.amplitudes.clear();
      for (const auto& t : split_list(value)) cfg.amplitudes.push_back(parse_double(t, key, lineno));
      cfg.grid_in_db = false;
    } else if (key == "db_start") {
      cfg.db_start = parse_double(value, key, lineno);
      cfg.grid_in_db = true;
    } else if (key == "db_stop") {
      cfg.db_stop = parse_double(value, key, lineno);
      cfg.grid_in_db = true;
    } else if (key == "db_points") {
      cfg.db_points = static_cast<int>(parse_double(value, key, lineno));
      cfg.grid_in_db = true;
    } else if (key == "db_convention") {
      if (value != "half-range" && value != "linear")
        throw config_error("config line " + std::to_string(lineno) +
                           ": db_convention must be half-range or linear");
      cfg.db_convention = value;
    } else if (key == "bounds") {
      cfg.bounds = split_list(value);
    } else if (key == "samples") {
      cfg.samples = static_cast<std::int64_t>(parse_double(value, key, lineno));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_double(value, key, lineno));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "input") {
      cfg.input_kind = value;
    } else if (key == "pam_points") {
      cfg.pam_points.clear();
      for (const auto& t : split_list(value))
        cfg.pam_points.push_back(static_cast<int>(parse_double(t, key, lineno)));
    } else if (key == "pam_amplitudes") {
      cfg.pam_amplitudes.clear();
      for (const auto& t : split_list(value))
        cfg.pam_amplitudes.push_back(parse_double(t, key, lineno));
    } else if (key == "point") {
      const auto toks = split_list(value);
      cfg.point.resize(toks.size());
      for (std::size_t i = 0; i < toks.size(); ++i)
        cfg.point(i) = parse_double(toks[i], key, lineno);
    } else if (key == "ensemble") {
      cfg.ensemble = value;
    } else if (key == "pam_gap_constant") {
      cfg.pam_gap_constant_override = parse_double(value, key, lineno);
    } else {
      throw config_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

SweepConfig fig2_preset() {
  SweepConfig cfg;
  Eigen::MatrixXd h(2, 2);
  h << 0.3, 0.0, 0.0, 0.1;
  cfg.channel = h;
  cfg.constraint_is_box = true;
  cfg.box_profile = Eigen::Vector2d(1.0, 1.0);
  cfg.grid_in_db = true;
  cfg.db_start = 0.0;
  cfg.db_stop = 30.0;
  cfg.db_points = 40;
  cfg.db_convention = "half-range";
  cfg.bounds = {"moment", "moment_p2", "dual2_box", "jensen_diag", "epi", "epi_paper_vol"};
  cfg.preset = "fig2";
  return cfg;
}

SweepConfig fig3_preset() {
  SweepConfig cfg;
  Eigen::MatrixXd h(1, 3);
  h << 0.6557, 0.0357, 0.8491;
  cfg.channel = h;
  cfg.constraint_is_box = true;
  cfg.box_profile = Eigen::Vector3d(1.0, 1.0, 1.0);
  cfg.grid_in_db = true;
  cfg.db_start = 0.0;
  cfg.db_stop = 16.25;
  cfg.db_points = 14;
  cfg.db_convention = "half-range";
  cfg.bounds = {"moment", "moment_p2", "jensen_svd", "epi_svd", "epi_svd_paper"};
  cfg.preset = "fig3";
  return cfg;
}

namespace {

std::vector<double> amplitude_grid(const SweepConfig& cfg) {
  std::vector<double> grid;
  if (cfg.grid_in_db) {
    if (cfg.db_points < 1) throw config_error("db_points must be >= 1");
    if (cfg.db_points == 1) {
      grid.push_back(db_to_linear(cfg.db_start, cfg.db_convention));
    } else {
      for (int i = 0; i < cfg.db_points; ++i) {
        const double db =
            cfg.db_start + (cfg.db_stop - cfg.db_start) * i / (cfg.db_points - 1);
        grid.push_back(db_to_linear(db, cfg.db_convention));
      }
    }
  } else {
    grid = cfg.amplitudes;
  }
  if (grid.empty()) throw config_error("empty amplitude grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw config_error("amplitude grid must be strictly increasing");
  return grid;
}

InputSpace make_space(const SweepConfig& cfg, int nt, double amplitude) {
  if (cfg.constraint_is_box) {
    Eigen::VectorXd profile =
        cfg.box_profile.size() ? cfg.box_profile : Eigen::VectorXd::Ones(nt);
    if (profile.size() != nt) throw config_error("box_profile length does not match channel");
    return InputSpace::box(profile * amplitude);
  }
  return InputSpace::ball(nt, amplitude);
}

BoundResult eval_bound(const std::string& name, const ChannelMatrix& h, const InputSpace& x,
                       const SweepConfig& cfg, std::uint64_t row_seed) {
  if (name == "moment") return moment_bound(h, x);
  if (name == "moment_p2") {
    BoundResult r = moment_bound_at_p(h, x, MomentOrder(2.0));
    r.name = "moment_p2";
    return r;
  }
  if (name == "dual1_ball") return duality_ball_bound(h, x);
  if (name == "dual2_box") return duality_box_bound(h, x);
  if (name == "dual2_box_svd") return duality_box_svd_bound(h, x);
  if (name == "dual2_diag_ball_paper") return duality_diag_ball_paper_variant(h, x);
  if (name == "epi") return epi_uniform_invertible(h, x).exact;
  if (name == "epi_paper_vol") return epi_uniform_invertible(h, x).paper;
  if (name == "epi_svd") return epi_svd(h, x.halfwidths()).exact;
  if (name == "epi_svd_paper") return epi_svd(h, x.halfwidths()).paper;
  if (name == "jensen_diag")
    return jensen_bound_diag(h.matrix().diagonal().cwiseAbs(), x);
  if (name == "jensen_svd") return jensen_svd(h, x.halfwidths());
  if (name == "ow_pam") return ow_pam_diag(h, x);
  if (name == "jensen_mc") {
    if (!x.is_box()) throw config_error("jensen_mc requires a box constraint");
    McBudget mc;
    mc.samples = cfg.samples;
    mc.seed = row_seed;
    return jensen_bound_general(h, InputDistribution::uniform_box(x.halfwidths()), mc);
  }
  throw config_error("unknown bound name: " + name);
}

}  // namespace

SweepTable run_sweep(const SweepConfig& cfg, int workers) {
  if (cfg.channel.size() == 0) throw config_error("sweep: no channel configured");
  if (cfg.bounds.empty()) throw config_error("sweep: no bounds selected");
  for (const auto& b : cfg.bounds) {
    const auto& known = known_bound_names();
    if (std::find(known.begin(), known.end(), b) == known.end())
      throw config_error("unknown bound name: " + b);
  }
  const ChannelMatrix h(cfg.channel);
  const std::vector<double> grid = amplitude_grid(cfg);

  SweepTable table;
  table.seed = cfg.seed;
  table.convention = cfg.db_convention;
  table.rows.resize(grid.size() * cfg.bounds.size());

  const int w = resolve_workers(workers);
  parallel_for(static_cast<int>(grid.size()), w, [&](int gi) {
    const double a = grid[gi];
    const InputSpace x = make_space(cfg, h.cols(), a);
    for (std::size_t bi = 0; bi < cfg.bounds.size(); ++bi) {
      SweepRow row;
      row.amplitude_linear = a;
      row.amplitude_db = linear_to_db(a, cfg.db_convention);
      row.bound = cfg.bounds[bi];
      std::uint64_t mix = cfg.seed ^ (0x9e3779b97f4a7c15ULL * (gi * 1000ull + bi));
      const std::uint64_t row_seed = splitmix64_next(mix);
      try {
        const BoundResult res = eval_bound(cfg.bounds[bi], h, x, cfg, row_seed);
        row.kind = res.kind;
        row.bits = res.value_bits;
        row.note = res.note;
      } catch (const budget_error& e) {
        row.note = std::string("error: ") + e.what();
      } catch (const std::exception& e) {
        row.note = std::string("error: ") + e.what();
      }
      table.rows[gi * cfg.bounds.size() + bi] = std::move(row);
    }
  });
  return table;
}

std::string sweep_to_csv(const SweepTable& table) {
  std::ostringstream os;
  os << "# ampcap sweep\n";
  os << "# seed=" << table.seed << "\n";
  os << "# convention=" << table.convention << "\n";
  os << "amplitude_linear,amplitude_dB,bound,kind,bits,note\n";
  for (const auto& r : table.rows) {
    os << fmt(r.amplitude_linear) << "," << fmt(r.amplitude_db) << "," << r.bound << ","
       << to_string(r.kind) << "," << fmt(r.bits) << "," << csv_escape(r.note) << "\n";
  }
  return os.str();
}

AuditOutput run_audit(const SweepConfig& cfg, int workers) {
  const int w = resolve_workers(workers);
  std::vector<GapCertificate> certs;
  std::vector<Instance> sandwich_set;

  if (cfg.ensemble == "fig2") {
    sandwich_set = fig2_instances();
  } else if (cfg.ensemble == "fig3") {
    sandwich_set = fig3_instances();
  } else if (cfg.ensemble == "default") {
    sandwich_set = fig2_instances();
    auto f3 = fig3_instances();
    sandwich_set.insert(sandwich_set.end(), f3.begin(), f3.end());
    auto r2 = random_invertible_instances(2, 20, {1.0, 10.0, 100.0, 1000.0}, 0xC0FFEE);
    auto r3 = random_invertible_instances(3, 20, {1.0, 10.0, 100.0, 1000.0}, 0xFACADE);
    sandwich_set.insert(sandwich_set.end(), r2.begin(), r2.end());
    sandwich_set.insert(sandwich_set.end(), r3.begin(), r3.end());
  } else {
    throw config_error("unknown audit ensemble: " + cfg.ensemble);
  }

  // PAM gap certificates over the diagonal grid (plus the fig2 preset when selected)
  if (cfg.ensemble == "default") {
    for (const auto& inst : pam_grid_instances())
      certs.push_back(certify_pam_gap(inst.h, inst.x, cfg.pam_gap_constant_override));
    for (const auto& inst : packing_ensemble_instances()) {
      auto pg = certify_packing_gap(inst.h, inst.x);
      pg.exact_rho.instance = inst.label;
      certs.push_back(pg.exact_rho);
      if (pg.estimate_rho) {
        pg.estimate_rho->instance = inst.label;
        certs.push_back(*pg.estimate_rho);
      }
    }
  } else if (cfg.ensemble == "fig2") {
    for (const auto& inst : sandwich_set)
      certs.push_back(certify_pam_gap(inst.h, inst.x, cfg.pam_gap_constant_override));
  }

  const auto rows = sandwich_report(sandwich_set, Tolerance{}, w);
  for (const auto& r : rows) certs.push_back(r.cert);

  AuditOutput out;
  out.certificates = std::move(certs);
  out.all_pass = std::all_of(out.certificates.begin(), out.certificates.end(),
                             [](const GapCertificate& c) { return c.pass; });
  out.csv = certificates_to_csv(out.certificates);
  out.report = certificates_report(out.certificates);
  return out;
}

McEstimate run_mi_estimate(const SweepConfig& cfg, int workers) {
  if (cfg.channel.size() == 0) throw config_error("mi: no channel configured");
  const ChannelMatrix h(cfg.channel);
  InputDistribution d = [&] {
    if (cfg.input_kind == "pam") {
      if (cfg.pam_points.empty() || cfg.pam_points.size() != cfg.pam_amplitudes.size())
        throw config_error("mi: pam_points and pam_amplitudes must be set and equal length");
      std::vector<PamConstellation> pams;
      for (std::size_t i = 0; i < cfg.pam_points.size(); ++i)
        pams.emplace_back(cfg.pam_points[i], cfg.pam_amplitudes[i]);
      return InputDistribution::pam_product(std::move(pams));
    }
    if (cfg.input_kind == "point") {
      if (cfg.point.size() == 0) throw config_error("mi: point input needs 'point = ...'");
      return InputDistribution::point_mass(cfg.point);
    }
    throw config_error("mi: input must be 'pam' or 'point'");
  }();
  return mutual_information_discrete(d, h, cfg.samples, cfg.seed, resolve_workers(workers));
}

std::string mi_to_csv(const McEstimate& est) {
  std::ostringstream os;
  os << "# ampcap mi\n";
  os << "# seed=" << est.seed << "\n";
  os << "estimate_bits,std_error,samples,seed\n";
  os << fmt(est.value) << "," << fmt(est.std_error) << "," << est.samples << "," << est.seed
     << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file: " + path);
  out << content;
}

}  // namespace ampcap
