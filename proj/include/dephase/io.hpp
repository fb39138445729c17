#pragma once

// File formats
//
//   order series CSV   t,Re_z1,Im_z1,R             17 significant digits
//   snapshot CSV       k,omega,re,im               one row per (k, omega)
//   snapshot binary    "DPHSNAP1" | u64 k_max | u64 n_omega | f64 half_width | f64 time
//                      | (2 k_max + 1) * n_omega * (f64 re, f64 im), k ascending
//                      all little endian

#include "dephase/core.hpp"
#include "dephase/estimates.hpp"
#include "dephase/norms.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace dephase {

std::string format_double(double v);

void write_order_csv(const std::filesystem::path& path, const OrderSeries& series);
OrderSeries read_order_csv(const std::filesystem::path& path);

void write_snapshot_csv(const std::filesystem::path& path, const MixedField& field);
void write_snapshot_binary(const std::filesystem::path& path, const MixedField& field);
MixedField read_snapshot_binary(const std::filesystem::path& path);

nlohmann::json to_json(const NormReport& report);
nlohmann::json to_json(const DecayFit& fit);

/// {name, max_ratio, argmax_t, fit, refinement_stability}
nlohmann::json check_report(const std::string& name, double max_ratio, double argmax_t,
                            const std::optional<DecayFit>& fit,
                            const std::optional<double>& refinement_stability);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
std::string file_checksum(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace dephase
