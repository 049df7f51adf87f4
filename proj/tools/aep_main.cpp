#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aep/aep.h"

namespace {

int report_failure(aep_status status) {
  std::fprintf(stderr, "error: %s\n", aep_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auditory-event-prediction reinforcement-learning experiments"};
  app.set_version_flag("--version",
                       std::string(aep_version()) + " (" + aep_source_hash() + ")");
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "run one (method, seed) experiment");
  std::string config_path, method, out_dir, dump_audio;
  std::uint64_t seed = 0;
  train->add_option("--config", config_path, "experiment config file (flat key = value)")
      ->check(CLI::ExistingFile);
  train->add_option("--method", method, "override the config's method");
  train->add_option("--seed", seed, "master seed")->capture_default_str();
  train->add_option("--out", out_dir, "run output directory")->required();
  train->add_option("--dump-audio", dump_audio, "directory for raw non-silent audio clips");

  auto* plot = app.add_subcommand("plot", "aggregate finished runs into plots");
  std::vector<std::string> run_dirs;
  std::string plot_out;
  plot->add_option("--runs", run_dirs, "run directories to aggregate")
      ->required()
      ->expected(-1);
  plot->add_option("--out", plot_out, "plot output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    std::string config_text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::fprintf(stderr, "error: cannot read %s\n", config_path.c_str());
        return static_cast<int>(AEP_ERR_IO);
      }
      std::ostringstream body;
      body << in.rdbuf();
      config_text = body.str();
    }

    aep_run_summary summary;
    const aep_status status = aep_run_experiment(
        config_text.empty() ? nullptr : config_text.c_str(),
        method.empty() ? nullptr : method.c_str(), seed, out_dir.c_str(),
        dump_audio.empty() ? nullptr : dump_audio.c_str(), &summary);
    if (status != AEP_OK) return report_failure(status);

    std::printf("run complete: steps=%" PRId64 " iterations=%" PRId64 " final_return=%g\n",
                summary.steps, summary.iterations, summary.final_return);
    if (summary.stopped_early) std::printf("stopped early at the return target\n");
    if (summary.phase2_start_step >= 0)
      std::printf("event classes frozen: k=%d at step %" PRId64 "\n", summary.frozen_k,
                  summary.phase2_start_step);
    if (summary.first_reward_step >= 0)
      std::printf("first extrinsic reward at step %" PRId64 "\n", summary.first_reward_step);
    return 0;
  }

  std::vector<const char*> dirs;
  dirs.reserve(run_dirs.size());
  for (const std::string& d : run_dirs) dirs.push_back(d.c_str());
  const aep_status status = aep_emit_plots(dirs.data(), dirs.size(), plot_out.c_str());
  if (status != AEP_OK) return report_failure(status);
  std::printf("plots written to %s\n", plot_out.c_str());
  return 0;
}
