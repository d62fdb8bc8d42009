#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ampcap/parallel.hpp"
#include "ampcap/sweep.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  std::int64_t samples = -1;
  int workers = 0;
};

void add_common(CLI::App* sub, CommonOpts* opts, bool config_required) {
  auto* c = sub->add_option("--config", opts->config, "key=value config file");
  if (config_required) c->required();
  sub->add_option("--out", opts->out, "output CSV path");
  sub->add_option("--seed", opts->seed, "RNG seed override");
  sub->add_option("--samples", opts->samples, "Monte-Carlo sample budget override");
  sub->add_option("--workers", opts->workers,
                  "worker threads (default: AMPCAP_WORKERS or hardware)");
}

ampcap::SweepConfig load_config(const CommonOpts& opts, const std::string& preset) {
  ampcap::SweepConfig cfg;
  if (!preset.empty()) {
    cfg = preset == "fig2" ? ampcap::fig2_preset() : ampcap::fig3_preset();
  }
  if (!opts.config.empty()) cfg = ampcap::parse_config_file(opts.config);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.samples >= 0) cfg.samples = opts.samples;
  if (!opts.out.empty()) cfg.out = opts.out;
  return cfg;
}

int do_sweep(const ampcap::SweepConfig& cfg, int workers) {
  const ampcap::SweepTable table = ampcap::run_sweep(cfg, workers);
  const std::string csv = ampcap::sweep_to_csv(table);
  if (cfg.out.empty()) {
    std::cout << csv;
  } else {
    ampcap::write_text_file(cfg.out, csv);
    std::cout << "wrote " << table.rows.size() << " rows to " << cfg.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ampcap: capacity bounds for amplitude-constrained MIMO Gaussian channels"};
  app.require_subcommand(1);

  CommonOpts sweep_opts, audit_opts, mi_opts, fig2_opts, fig3_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate bounds over an amplitude grid");
  add_common(sweep_cmd, &sweep_opts, true);
  auto* audit_cmd = app.add_subcommand("audit", "run gap and sandwich certificates");
  add_common(audit_cmd, &audit_opts, false);
  auto* mi_cmd = app.add_subcommand("mi", "Monte-Carlo mutual information for a discrete input");
  add_common(mi_cmd, &mi_opts, true);
  auto* fig2_cmd = app.add_subcommand("fig2", "reproduce the 2x2 diagonal comparison sweep");
  add_common(fig2_cmd, &fig2_opts, false);
  auto* fig3_cmd = app.add_subcommand("fig3", "reproduce the 3x1 SVD-precoded comparison sweep");
  add_common(fig3_cmd, &fig3_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_cmd->parsed()) return do_sweep(load_config(sweep_opts, ""), sweep_opts.workers);
    if (fig2_cmd->parsed()) return do_sweep(load_config(fig2_opts, "fig2"), fig2_opts.workers);
    if (fig3_cmd->parsed()) return do_sweep(load_config(fig3_opts, "fig3"), fig3_opts.workers);

    if (audit_cmd->parsed()) {
      const ampcap::SweepConfig cfg = load_config(audit_opts, "");
      const ampcap::AuditOutput out = ampcap::run_audit(cfg, audit_opts.workers);
      if (cfg.out.empty()) {
        std::cout << out.report;
      } else {
        ampcap::write_text_file(cfg.out, out.csv);
        ampcap::write_text_file(cfg.out + ".report.txt", out.report);
        std::cout << "wrote " << out.certificates.size() << " certificates to " << cfg.out << "\n";
      }
      if (!out.all_pass) {
        std::cerr << "audit: certificate failures detected\n";
        return 2;
      }
      return 0;
    }

    if (mi_cmd->parsed()) {
      const ampcap::SweepConfig cfg = load_config(mi_opts, "");
      const ampcap::McEstimate est = ampcap::run_mi_estimate(cfg, mi_opts.workers);
      const std::string csv = ampcap::mi_to_csv(est);
      if (cfg.out.empty()) {
        std::cout << csv;
      } else {
        ampcap::write_text_file(cfg.out, csv);
        std::cout << "estimate=" << est.value << " bits, std_error=" << est.std_error << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ampcap: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
