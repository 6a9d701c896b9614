#pragma once

#include <string>

#include "ozbias/grid.hpp"
#include "ozbias/raster.hpp"

#include <json.hpp>

namespace ozbias {

// On-disk array formats share one layout: a single-line JSON header, a
// newline, then the raw little-endian payload. Floats are stored as f32
// regardless of in-memory precision.
//
//   .gstack  header {format, spec, channels, date, dtype, layout} + f32 data
//   .mfield  header {format, spec, date, dtype, mask} + f32 values + u8 mask
//   .rast    header {format, kind, bounds, rows, cols, dtype} + u8|f32 data

nlohmann::json spec_to_json(const GridSpec& spec);
GridSpec spec_from_json(const nlohmann::json& j);

void write_gstack(const GridStack& stack, const std::string& path);
GridStack read_gstack(const std::string& path);

void write_mfield(const MaskedField& field, const std::string& path);
MaskedField read_mfield(const std::string& path);

void write_raster(const Raster& raster, const std::string& path);
Raster read_raster(const std::string& path);

// Shared helpers for other headered binaries (.ckpt).
void write_header_and_payload(const std::string& path,
                              const nlohmann::json& header,
                              const std::string& payload);
nlohmann::json read_header(std::ifstream& in, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ozbias
