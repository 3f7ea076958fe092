#pragma once

// Batch commands behind the `mbqkd` tool. Each writes its data to a stream so
// the same code paths serve the executable and the golden-file tests.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbqkd/analysis.hpp"
#include "mbqkd/errors.hpp"
#include "mbqkd/protocol.hpp"
#include "mbqkd/random.hpp"
#include "mbqkd/transcript.hpp"

namespace mbqkd::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20171018;
inline constexpr const char* kSeedEnvVar = "MBQKD_SEED";

// --seed wins, then $MBQKD_SEED, then the built-in default.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env_value) {
  if (flag) return *flag;
  if (env_value && *env_value) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env_value, &used, 10);
      if (used == std::string(env_value).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string(kSeedEnvVar) + " is not an unsigned integer");
  }
  return kDefaultSeed;
}

struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  double duration_seconds = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["duration_seconds"] = duration_seconds;
    return j;
  }
};

// Written next to the data file as <path>.manifest.json.
inline void write_manifest(const std::string& data_path, const RunManifest& m) {
  std::ofstream os(data_path + ".manifest.json");
  if (!os) throw std::runtime_error("cannot write manifest for " + data_path);
  os << m.to_json().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::uint64_t rounds = 1000;
  double eve_presence = 0.0;
  bool attack = true;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "jsonl";
};

struct SimulateSummary {
  std::uint64_t rounds = 0;
  std::uint64_t key_length = 0;
  std::uint64_t control_count = 0;
  std::uint64_t bitflip_count = 0;
  bool eve_detected = false;
  std::uint64_t key_errors = 0;  // key symbols that differ from Alice's

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["rounds"] = rounds;
    j["key_length"] = key_length;
    j["control_count"] = control_count;
    j["bitflip_count"] = bitflip_count;
    j["eve_detected"] = eve_detected;
    j["key_errors"] = key_errors;
    return j;
  }
};

inline SessionConfig session_config(const SimulateOptions& o) {
  SessionConfig c;
  c.n_rounds = o.rounds;
  c.eve_presence = o.eve_presence;
  c.attack_enabled = o.attack;
  c.seed = o.seed;
  c.validate();
  return c;
}

inline SimulateSummary cmd_simulate(const SimulateOptions& o, std::ostream& transcript_out) {
  if (o.format != "jsonl" && o.format != "csv") throw ValidationError("--format must be jsonl or csv");
  const auto transcript = run_session(session_config(o));
  if (o.format == "jsonl")
    write_transcript_jsonl(transcript_out, transcript);
  else
    write_transcript_csv(transcript_out, transcript);

  const auto sifted = sift(transcript);
  SimulateSummary s;
  s.rounds = transcript.size();
  s.key_length = sifted.key_symbols.size();
  s.control_count = sifted.control_records.size();
  s.bitflip_count = sifted.bitflip_count;
  s.eve_detected = sifted.eve_detected;
  for (const auto& r : transcript)
    if (r.kind == RoundKind::SameBasis && r.bob_outcome != r.alice_symbol) ++s.key_errors;
  return s;
}

inline void write_summary(std::ostream& os, const SimulateSummary& s) {
  os << "rounds," << s.rounds << '\n'
     << "key_length," << s.key_length << '\n'
     << "control_count," << s.control_count << '\n'
     << "bitflip_count," << s.bitflip_count << '\n'
     << "eve_detected," << (s.eve_detected ? "true" : "false") << '\n'
     << "key_errors," << s.key_errors << '\n';
}

// ---------------------------------------------------------------------------
// table

struct TableOptions {
  int which = 1;  // 1: no HWPs, 2: both HWPs
  double x = 1.0;
  std::uint64_t rounds = 0;  // 0: closed form only
  std::uint64_t seed = kDefaultSeed;
};

inline std::string eve_label(std::size_t k) { return k == kEveNone ? "none" : std::to_string(k + 1); }

// Rows in canonical (j, k, m) order, k = 1..4 then none.
inline void cmd_table(const TableOptions& o, std::ostream& os) {
  if (o.which != 1 && o.which != 2) throw ValidationError("--which must be 1 or 2");
  validate_presence(o.x);
  const BasisConfig config = o.which == 1 ? BasisConfig::NoHWP : BasisConfig::BothHWP;
  const auto closed = joint_distribution_closed_form(o.x, config);
  std::optional<JointEstimate> mc;
  if (o.rounds > 0) {
    SessionConfig c;
    c.n_rounds = o.rounds;
    c.eve_presence = o.x;
    c.seed = o.seed;
    c.fixed_bases = bases_of(config);
    mc = estimate_joint_from_transcript(run_session(c), config, o.x);
  }
  os << "j,k,m,closed_form,monte_carlo,stderr\n";
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < kEveSlots; ++k)
      for (std::size_t m = 0; m < 4; ++m) {
        os << j + 1 << ',' << eve_label(k) << ',' << m + 1 << ',' << format_number(closed.p[j][k][m]) << ',';
        if (mc) os << format_number(mc->distribution.p[j][k][m]) << ',' << format_number(mc->standard_error[j][k][m]);
        else os << ',';
        os << '\n';
      }
}

// ---------------------------------------------------------------------------
// mi-curve

struct MiCurveOptions {
  double x_start = 0.0;
  double x_end = 1.0;
  std::uint64_t steps = 100;  // intervals; steps + 1 rows
  std::uint64_t rounds = 0;
  std::uint64_t seed = kDefaultSeed;
};

inline void cmd_mi_curve(const MiCurveOptions& o, std::ostream& os) {
  if (!(o.x_start >= 0.0 && o.x_end <= 1.0 && o.x_start <= o.x_end))
    throw ValidationError("need 0 <= --x-start <= --x-end <= 1");
  if (o.steps == 0 && o.x_start != o.x_end) throw ValidationError("--steps must be positive for a non-empty range");
  os << "x,i_ab,i_ae";
  if (o.rounds > 0) os << ",i_ab_mc,i_ab_stderr,i_ae_mc,i_ae_stderr";
  os << '\n';
  for (std::uint64_t i = 0; i <= o.steps; ++i) {
    const double x = o.steps == 0 ? o.x_start
                                  : (i == o.steps ? o.x_end
                                                  : o.x_start + (o.x_end - o.x_start) * static_cast<double>(i) /
                                                                    static_cast<double>(o.steps));
    os << format_number(x) << ',' << format_number(iab_closed_form(x)) << ',' << format_number(iae_closed_form(x));
    if (o.rounds > 0) {
      SessionConfig c;
      c.n_rounds = o.rounds;
      c.eve_presence = x;
      c.seed = splitmix64(o.seed + i);
      const auto rep = estimate_mi_from_transcript(run_session(c), x);
      os << ',' << format_number(rep.i_ab_estimate) << ',' << format_number(rep.i_ab_stderr) << ','
         << format_number(rep.i_ae_estimate) << ',' << format_number(rep.i_ae_stderr);
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// detect

struct DetectOptions {
  std::optional<std::uint64_t> cycles;
  std::optional<std::uint64_t> characters;
  std::uint64_t rounds = 0;  // Monte-Carlo trials; 0 skips the estimate
  double eve_presence = 1.0;
  std::uint64_t seed = kDefaultSeed;
};

// Columns: quantity,n,closed_form,monte_carlo,stderr,ci95_low,ci95_high.
// For characters the closed form is the per-character constant raised to n.
inline void cmd_detect(const DetectOptions& o, std::ostream& os) {
  if (!o.cycles && !o.characters) throw ValidationError("give --cycles or --characters");
  validate_presence(o.eve_presence);
  os << "quantity,n,closed_form,monte_carlo,stderr,ci95_low,ci95_high\n";
  auto emit = [&](const char* what, std::uint64_t n, double closed, std::optional<EscapeEstimate> mc) {
    os << what << ',' << n << ',' << format_number(closed) << ',';
    if (mc) {
      const double lo = std::max(0.0, mc->probability - 1.96 * mc->standard_error);
      const double hi = std::min(1.0, mc->probability + 1.96 * mc->standard_error);
      os << format_number(mc->probability) << ',' << format_number(mc->standard_error) << ',' << format_number(lo)
         << ',' << format_number(hi);
    } else {
      os << ",,,";
    }
    os << '\n';
  };
  if (o.cycles) {
    std::optional<EscapeEstimate> mc;
    if (o.rounds > 0) mc = estimate_cycle_escape(o.eve_presence, *o.cycles, o.rounds, o.seed);
    emit("cycles", *o.cycles, detection_escape_probability(*o.cycles, o.eve_presence), mc);
  }
  if (o.characters) {
    std::optional<EscapeEstimate> mc;
    if (o.rounds > 0) mc = estimate_character_escape(o.eve_presence, *o.characters, o.rounds, splitmix64(o.seed));
    emit("characters", *o.characters, std::pow(detection_escape_per_character(), static_cast<double>(*o.characters)),
         mc);
  }
}

}  // namespace mbqkd::cli
