// mbqkd: run mixed-basis QKD sessions and reproduce the security analysis.
//
//   mbqkd simulate --rounds N --eve-presence X --attack on|off --seed S --out PATH --format jsonl|csv
//   mbqkd table --which 1|2 --x X [--rounds N]
//   mbqkd mi-curve --x-start A --x-end B --steps N [--rounds N]
//   mbqkd detect (--cycles N | --characters N) [--rounds N] [--eve-presence X]
//
// Exit codes: 0 ok, 2 bad flags, 1 runtime failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mbqkd/cli.hpp"

namespace {

using mbqkd::cli::RunManifest;

// Sends `body` to --out (plus manifest) or to stdout.
void emit(const std::string& out_path, RunManifest manifest, const std::function<void(std::ostream&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  if (out_path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
  body(os);
  os.close();
  if (!os) throw std::runtime_error("write to " + out_path + " failed");
  manifest.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  mbqkd::cli::write_manifest(out_path, manifest);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-basis two-qubit QKD simulator and security analysis"};
  app.set_version_flag("--version", mbqkd::cli::kToolVersion);
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  std::string out_path;

  // simulate
  mbqkd::cli::SimulateOptions sim;
  std::string attack = "on";
  auto* simulate = app.add_subcommand("simulate", "Run a session and write its transcript");
  simulate->add_option("--rounds", sim.rounds, "Number of rounds")->check(CLI::NonNegativeNumber);
  simulate->add_option("--eve-presence", sim.eve_presence, "Eve's presence X in [0,1]")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--attack", attack, "Enable the intercept-resend attack")
      ->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--seed", seed_flag, "Session seed (default: $MBQKD_SEED or built-in)");
  simulate->add_option("--out", out_path, "Transcript path")->required();
  simulate->add_option("--format", sim.format, "Transcript format")->check(CLI::IsMember({"jsonl", "csv"}));

  // table
  mbqkd::cli::TableOptions tab;
  auto* table = app.add_subcommand("table", "Joint probability table p(j,k,m), closed form and Monte Carlo");
  table->add_option("--which", tab.which, "1: no HWPs, 2: both HWPs")->required()->check(CLI::IsMember({1, 2}));
  table->add_option("--x", tab.x, "Eve's presence X")->required()->check(CLI::Range(0.0, 1.0));
  table->add_option("--rounds", tab.rounds, "Rounds for the Monte-Carlo column (0: none)");
  table->add_option("--seed", seed_flag, "Seed");
  table->add_option("--out", out_path, "Output CSV (default stdout)");

  // mi-curve
  mbqkd::cli::MiCurveOptions mic;
  auto* mi_curve = app.add_subcommand("mi-curve", "I_AB(X) and I_AE(X) over a grid of X");
  mi_curve->add_option("--x-start", mic.x_start, "First X")->check(CLI::Range(0.0, 1.0));
  mi_curve->add_option("--x-end", mic.x_end, "Last X")->check(CLI::Range(0.0, 1.0));
  mi_curve->add_option("--steps", mic.steps, "Grid intervals");
  mi_curve->add_option("--rounds", mic.rounds, "Rounds per point for Monte-Carlo estimates (0: none)");
  mi_curve->add_option("--seed", seed_flag, "Seed");
  mi_curve->add_option("--out", out_path, "Output CSV (default stdout)");

  // detect
  mbqkd::cli::DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Control-mode escape probabilities");
  detect->add_option("--cycles", det.cycles, "Number of 4-message control cycles");
  detect->add_option("--characters", det.characters, "Number of 8-bit characters");
  detect->add_option("--rounds", det.rounds, "Monte-Carlo trials (0: none)");
  detect->add_option("--eve-presence", det.eve_presence, "Eve's presence X")->check(CLI::Range(0.0, 1.0));
  detect->add_option("--seed", seed_flag, "Seed");
  detect->add_option("--out", out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const std::uint64_t seed = mbqkd::cli::resolve_seed(seed_flag, std::getenv(mbqkd::cli::kSeedEnvVar));
    RunManifest manifest;
    manifest.seed = seed;

    if (simulate->parsed()) {
      sim.attack = attack == "on";
      sim.seed = seed;
      manifest.command = "simulate";
      manifest.config = {{"rounds", sim.rounds},  {"eve_presence", sim.eve_presence}, {"attack", attack},
                         {"format", sim.format}, {"out", out_path}};
      mbqkd::cli::SimulateSummary summary;
      emit(out_path, manifest, [&](std::ostream& os) { summary = mbqkd::cli::cmd_simulate(sim, os); });
      mbqkd::cli::write_summary(std::cout, summary);
    } else if (table->parsed()) {
      tab.seed = seed;
      manifest.command = "table";
      manifest.config = {{"which", tab.which}, {"x", tab.x}, {"rounds", tab.rounds}};
      emit(out_path, manifest, [&](std::ostream& os) { mbqkd::cli::cmd_table(tab, os); });
    } else if (mi_curve->parsed()) {
      mic.seed = seed;
      manifest.command = "mi-curve";
      manifest.config = {{"x_start", mic.x_start}, {"x_end", mic.x_end}, {"steps", mic.steps}, {"rounds", mic.rounds}};
      emit(out_path, manifest, [&](std::ostream& os) { mbqkd::cli::cmd_mi_curve(mic, os); });
    } else if (detect->parsed()) {
      det.seed = seed;
      manifest.command = "detect";
      manifest.config = {{"cycles", det.cycles ? nlohmann::ordered_json(*det.cycles) : nlohmann::ordered_json()},
                         {"characters", det.characters ? nlohmann::ordered_json(*det.characters) : nlohmann::ordered_json()},
                         {"rounds", det.rounds},
                         {"eve_presence", det.eve_presence}};
      emit(out_path, manifest, [&](std::ostream& os) { mbqkd::cli::cmd_detect(det, os); });
    }
  } catch (const mbqkd::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
