// Command line front end. Talks to the library only through dqo/dqo.h.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "dqo/dqo.h"

namespace {

struct Options {
  std::string config;
  std::string output_dir;
  double horizon = 0.0;
  std::string step;
  bool quiet = false;
};

using RunFn = dqo_status (*)(const dqo_config*, char**);

int report_failure(const char* what, dqo_status status) {
  std::fprintf(stderr, "dqo: %s failed [%s]: %s\n", what, dqo_status_name(status), dqo_last_error());
  return 1;
}

int run(const char* name, RunFn fn, const Options& opts) {
  dqo_config* config = nullptr;
  dqo_status status = dqo_config_load(opts.config.c_str(), &config);
  if (status != DQO_OK) return report_failure("loading config", status);

  if (!opts.output_dir.empty()) status = dqo_config_set_output_dir(config, opts.output_dir.c_str());
  if (status == DQO_OK && opts.horizon > 0.0) status = dqo_config_set_horizon(config, opts.horizon);
  if (status == DQO_OK && !opts.step.empty()) {
    double step = 0.0;
    if (opts.step != "auto") {
      try {
        step = std::stod(opts.step);
      } catch (const std::exception&) {
        std::fprintf(stderr, "dqo: --step must be a number or 'auto'\n");
        dqo_config_free(config);
        return 2;
      }
      if (!(step > 0.0)) {
        std::fprintf(stderr, "dqo: --step must be positive\n");
        dqo_config_free(config);
        return 2;
      }
    }
    status = dqo_config_set_step(config, step);
  }
  if (status != DQO_OK) {
    dqo_config_free(config);
    return report_failure("applying overrides", status);
  }

  char* report = nullptr;
  status = fn(config, &report);
  dqo_config_free(config);
  if (report) {
    if (!opts.quiet) std::printf("%s\n", report);
    dqo_string_free(report);
  }
  if (status != DQO_OK) return report_failure(name, status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed direct-coupling quantum observer"};
  app.set_version_flag("--version", std::string(dqo_version()));
  app.require_subcommand(1);

  Options opts;
  struct Command {
    const char* name;
    const char* help;
    RunFn fn;
  };
  const Command commands[] = {
      {"build", "assemble the augmented system and certify it", dqo_run_build},
      {"simulate", "propagate coefficient trajectories", dqo_run_simulate},
      {"timeavg", "time-averaged outputs and consensus error", dqo_run_timeavg},
      {"check", "run every certificate without writing trajectories", dqo_run_check},
  };

  RunFn selected = nullptr;
  const char* selected_name = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", opts.config, "experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--output-dir", opts.output_dir, "directory for CSV and report files");
    sub->add_option("--horizon", opts.horizon, "override the simulation horizon")->check(CLI::PositiveNumber);
    sub->add_option("--step", opts.step, "override the sample step, or 'auto'");
    sub->add_flag("-q,--quiet", opts.quiet, "do not print the JSON report");
    sub->callback([&selected, &selected_name, cmd] {
      selected = cmd.fn;
      selected_name = cmd.name;
    });
  }

  CLI11_PARSE(app, argc, argv);
  return run(selected_name, selected, opts);
}
