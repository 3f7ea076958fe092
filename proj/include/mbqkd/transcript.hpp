#pragma once

// Transcript serialization. JSON Lines: one RoundRecord object per line with
// fixed key order. CSV: same fields, header first, empty cell for absent
// optionals. Numbers elsewhere use format_number for stable golden output.

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mbqkd/errors.hpp"
#include "mbqkd/protocol.hpp"

namespace mbqkd {

// At most 10 significant digits, trailing zeros dropped, '.' separator.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline MixedBasisSymbol parse_symbol(std::string_view s) {
  for (auto sym : kAllSymbols)
    if (to_string(sym) == s) return sym;
  throw ValidationError("unknown symbol '" + std::string(s) + "'");
}

inline BasisChoice parse_basis(std::string_view s) {
  if (s == "plain") return BasisChoice::Plain;
  if (s == "hadamard") return BasisChoice::Hadamard;
  throw ValidationError("unknown basis '" + std::string(s) + "'");
}

inline RoundKind parse_kind(std::string_view s) {
  if (s == "same_basis") return RoundKind::SameBasis;
  if (s == "different_basis") return RoundKind::DifferentBasis;
  throw ValidationError("unknown round kind '" + std::string(s) + "'");
}

inline constexpr std::string_view kTranscriptFields[] = {"round_id",   "bob_basis",  "alice_basis",
                                                         "alice_symbol", "eve_active", "eve_symbol",
                                                         "eve_resent", "bob_outcome", "kind"};

inline nlohmann::ordered_json to_json(const RoundRecord& r) {
  auto opt = [](const std::optional<MixedBasisSymbol>& s) -> nlohmann::ordered_json {
    return s ? nlohmann::ordered_json(std::string(to_string(*s))) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["round_id"] = r.round_id;
  j["bob_basis"] = to_string(r.bob_basis);
  j["alice_basis"] = to_string(r.alice_basis);
  j["alice_symbol"] = to_string(r.alice_symbol);
  j["eve_active"] = r.eve_active;
  j["eve_symbol"] = opt(r.eve_symbol);
  j["eve_resent"] = opt(r.eve_resent);
  j["bob_outcome"] = to_string(r.bob_outcome);
  j["kind"] = to_string(r.kind);
  return j;
}

inline RoundRecord record_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* key) -> std::optional<MixedBasisSymbol> {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return parse_symbol(v.get<std::string>());
  };
  RoundRecord r;
  r.round_id = j.at("round_id").get<std::uint64_t>();
  r.bob_basis = parse_basis(j.at("bob_basis").get<std::string>());
  r.alice_basis = parse_basis(j.at("alice_basis").get<std::string>());
  r.alice_symbol = parse_symbol(j.at("alice_symbol").get<std::string>());
  r.eve_active = j.at("eve_active").get<bool>();
  r.eve_symbol = opt("eve_symbol");
  r.eve_resent = opt("eve_resent");
  r.bob_outcome = parse_symbol(j.at("bob_outcome").get<std::string>());
  r.kind = parse_kind(j.at("kind").get<std::string>());
  return r;
}

inline void write_transcript_jsonl(std::ostream& os, std::span<const RoundRecord> transcript) {
  for (const auto& r : transcript) os << to_json(r).dump() << '\n';
}

inline void write_transcript_csv(std::ostream& os, std::span<const RoundRecord> transcript) {
  for (std::size_t i = 0; i < std::size(kTranscriptFields); ++i) os << (i ? "," : "") << kTranscriptFields[i];
  os << '\n';
  auto opt = [](const std::optional<MixedBasisSymbol>& s) { return s ? std::string(to_string(*s)) : std::string(); };
  for (const auto& r : transcript) {
    os << r.round_id << ',' << to_string(r.bob_basis) << ',' << to_string(r.alice_basis) << ','
       << to_string(r.alice_symbol) << ',' << (r.eve_active ? "true" : "false") << ',' << opt(r.eve_symbol) << ','
       << opt(r.eve_resent) << ',' << to_string(r.bob_outcome) << ',' << to_string(r.kind) << '\n';
  }
}

inline std::vector<RoundRecord> read_transcript_jsonl(std::istream& is) {
  std::vector<RoundRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("transcript line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mbqkd
