#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <optional>
#include <string>

#include "logtr/experiment.hpp"
#include "logtr/tnsr.hpp"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kDivergence = 4 };

struct Common {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "experiment seed (overrides seed)");
}

logtr::ExperimentConfig load(const Common& c) {
  logtr::ExperimentConfig cfg = logtr::load_config(c.config);
  if (c.out) cfg.output_dir = *c.out;
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void print_metrics(const char* label, const logtr::MetricsReport& m) {
  fmt::print("{:<9} psnr {:.4f}  ssim {:.4f}  ergas {:.4f}  sam {:.4f}  uiqi {:.4f}\n", label, m.psnr, m.ssim, m.ergas,
             m.sam, m.uiqi);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral/multispectral fusion with a log-regularized tensor-ring model"};
  app.require_subcommand(1);

  Common sim, fuse, abl;
  auto* c_sim = app.add_subcommand("simulate", "degrade a ground truth into y.tnsr and z.tnsr");
  add_common(c_sim, sim);
  auto* c_fuse = app.add_subcommand("fuse", "fuse y and z; write xhat.tnsr and reports");
  add_common(c_fuse, fuse);
  auto* c_abl = app.add_subcommand("ablate", "run the five regularizer variants; write ablation.csv");
  add_common(c_abl, abl);

  std::string ref, est;
  double factor = 4.0;
  std::optional<std::string> metrics_out;
  logtr::MetricsOptions mopts;
  auto* c_met = app.add_subcommand("metrics", "quality indices of --est against --ref, both mapped by ref range to [0,255]");
  c_met->add_option("--ref", ref, "reference tensor")->required()->check(CLI::ExistingFile);
  c_met->add_option("--est", est, "estimated tensor")->required()->check(CLI::ExistingFile);
  c_met->add_option("--factor", factor, "downsampling factor for ERGAS")->capture_default_str();
  c_met->add_option("--uiqi-window", mopts.uiqi_window, "UIQI window size")->capture_default_str();
  c_met->add_option("--out", metrics_out, "directory for metrics.json");

  auto* c_ver = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*c_ver) {
      fmt::print("{}\n", logtr::version_string());
    } else if (*c_sim) {
      const auto cfg = load(sim);
      logtr::cmd_simulate(cfg);
      fmt::print("wrote x.tnsr, y.tnsr, z.tnsr, model.json to {}\n", cfg.output_dir);
    } else if (*c_fuse) {
      const auto cfg = load(fuse);
      const auto o = logtr::cmd_fuse(cfg);
      fmt::print("{} after {} iterations; results in {}\n", o.result.converged ? "converged" : "stopped at k_max",
                 o.result.history.size(), cfg.output_dir);
      if (o.metrics) print_metrics("fused", *o.metrics);
      if (o.baseline) print_metrics("baseline", *o.baseline);
    } else if (*c_abl) {
      const auto cfg = load(abl);
      for (const auto& row : logtr::cmd_ablate(cfg)) print_metrics(row.variant.c_str(), row.metrics);
    } else if (*c_met) {
      print_metrics("metrics", logtr::cmd_metrics(ref, est, factor, mopts, metrics_out));
    }
    return kOk;
  } catch (const logtr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const logtr::DivergenceError& e) {
    std::fprintf(stderr, "solver diverged: %s\n", e.what());
    return kDivergence;
  } catch (const logtr::NumericalError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kDivergence;
  } catch (const logtr::ShapeError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
    return kData;
  } catch (const logtr::ValueError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const logtr::TnsrError& e) {
    std::fprintf(stderr, "file error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}
