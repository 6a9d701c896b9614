#include "ozbias/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ozbias/errors.hpp"

namespace ozbias {

namespace {

void write_f32(std::ostream& out, const std::vector<double>& values) {
  std::vector<float> buf(values.begin(), values.end());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

std::vector<double> read_f32(std::istream& in, std::size_t count,
                             const std::string& path) {
  std::vector<float> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    throw IoError("truncated payload in " + path);
  }
  std::vector<double> out(buf.begin(), buf.end());
  for (double v : out) {
    if (!std::isfinite(v)) throw DataError("non-finite value in " + path);
  }
  return out;
}

void expect_eof(std::istream& in, const std::string& path) {
  char extra;
  if (in.read(&extra, 1) && in.gcount() == 1) {
    throw IoError("trailing bytes in " + path);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

}  // namespace

nlohmann::json spec_to_json(const GridSpec& spec) {
  nlohmann::json j{{"lat_min", spec.lat_min},
                   {"lat_max", spec.lat_max},
                   {"lon_min", spec.lon_min},
                   {"lon_max", spec.lon_max},
                   {"resolution", spec.resolution}};
  if (spec.shape_override) {
    j["shape_override"] = {spec.shape_override->first,
                           spec.shape_override->second};
  } else {
    j["shape_override"] = nullptr;
  }
  return j;
}

GridSpec spec_from_json(const nlohmann::json& j) {
  GridSpec spec;
  spec.lat_min = j.at("lat_min").get<double>();
  spec.lat_max = j.at("lat_max").get<double>();
  spec.lon_min = j.at("lon_min").get<double>();
  spec.lon_max = j.at("lon_max").get<double>();
  spec.resolution = j.at("resolution").get<double>();
  if (j.contains("shape_override") && !j.at("shape_override").is_null()) {
    auto s = j.at("shape_override");
    spec.shape_override = std::make_pair(s.at(0).get<int>(), s.at(1).get<int>());
  }
  spec.validate();
  return spec;
}

nlohmann::json read_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing header in " + path);
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad header in " + path + ": " + e.what());
  }
}

void write_header_and_payload(const std::string& path,
                              const nlohmann::json& header,
                              const std::string& payload) {
  auto out = open_out(path);
  out << header.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for " + path);
}

void write_gstack(const GridStack& stack, const std::string& path) {
  stack.validate();
  auto out = open_out(path);
  nlohmann::json header{{"format", "gstack"},
                        {"version", 1},
                        {"spec", spec_to_json(stack.spec)},
                        {"channels", stack.channels},
                        {"date", stack.date.to_string()},
                        {"dtype", "f32"},
                        {"layout", "C-row-major"}};
  out << header.dump() << '\n';
  write_f32(out, stack.data);
  if (!out) throw IoError("write failed for " + path);
}

GridStack read_gstack(const std::string& path) {
  auto in = open_in(path);
  auto header = read_header(in, path);
  if (header.value("format", "") != "gstack") {
    throw IoError(path + " is not a gstack file");
  }
  GridStack stack;
  stack.spec = spec_from_json(header.at("spec"));
  stack.channels = header.at("channels").get<std::vector<std::string>>();
  stack.date = Date::parse(header.at("date").get<std::string>());
  std::size_t count = stack.channels.size() *
                      static_cast<std::size_t>(stack.spec.rows()) *
                      stack.spec.cols();
  stack.data = read_f32(in, count, path);
  expect_eof(in, path);
  stack.validate();
  return stack;
}

void write_mfield(const MaskedField& field, const std::string& path) {
  field.validate();
  auto out = open_out(path);
  nlohmann::json header{{"format", "mfield"},
                        {"version", 1},
                        {"spec", spec_to_json(field.spec)},
                        {"date", field.date.to_string()},
                        {"dtype", "f32"},
                        {"mask", "u8"}};
  out << header.dump() << '\n';
  write_f32(out, field.values);
  out.write(reinterpret_cast<const char*>(field.mask.data()),
            static_cast<std::streamsize>(field.mask.size()));
  if (!out) throw IoError("write failed for " + path);
}

MaskedField read_mfield(const std::string& path) {
  auto in = open_in(path);
  auto header = read_header(in, path);
  if (header.value("format", "") != "mfield") {
    throw IoError(path + " is not a mfield file");
  }
  MaskedField field;
  field.spec = spec_from_json(header.at("spec"));
  field.date = Date::parse(header.at("date").get<std::string>());
  std::size_t n =
      static_cast<std::size_t>(field.spec.rows()) * field.spec.cols();
  field.values = read_f32(in, n, path);
  field.mask.resize(n);
  in.read(reinterpret_cast<char*>(field.mask.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw IoError("truncated mask in " + path);
  }
  for (auto m : field.mask) {
    if (m > 1) throw DataError("mask bytes must be 0/1 in " + path);
  }
  expect_eof(in, path);
  field.validate();
  return field;
}

void write_raster(const Raster& raster, const std::string& path) {
  raster.validate();
  auto out = open_out(path);
  bool categorical = raster.kind == RasterKind::categorical;
  nlohmann::json header{{"format", "rast"},
                        {"version", 1},
                        {"kind", categorical ? "categorical" : "continuous"},
                        {"bounds",
                         {{"lat_min", raster.bounds.lat_min},
                          {"lat_max", raster.bounds.lat_max},
                          {"lon_min", raster.bounds.lon_min},
                          {"lon_max", raster.bounds.lon_max}}},
                        {"rows", raster.rows},
                        {"cols", raster.cols},
                        {"dtype", categorical ? "u8" : "f32"}};
  out << header.dump() << '\n';
  if (categorical) {
    out.write(reinterpret_cast<const char*>(raster.codes.data()),
              static_cast<std::streamsize>(raster.codes.size()));
  } else {
    out.write(reinterpret_cast<const char*>(raster.values.data()),
              static_cast<std::streamsize>(raster.values.size() *
                                           sizeof(float)));
  }
  if (!out) throw IoError("write failed for " + path);
}

Raster read_raster(const std::string& path) {
  auto in = open_in(path);
  auto header = read_header(in, path);
  if (header.value("format", "") != "rast") {
    throw IoError(path + " is not a rast file");
  }
  Bounds b;
  const auto& jb = header.at("bounds");
  b.lat_min = jb.at("lat_min").get<double>();
  b.lat_max = jb.at("lat_max").get<double>();
  b.lon_min = jb.at("lon_min").get<double>();
  b.lon_max = jb.at("lon_max").get<double>();
  int rows = header.at("rows").get<int>();
  int cols = header.at("cols").get<int>();
  std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::string kind = header.at("kind").get<std::string>();
  Raster raster;
  if (kind == "categorical") {
    std::vector<std::uint8_t> codes(n);
    in.read(reinterpret_cast<char*>(codes.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw IoError("truncated payload in " + path);
    }
    raster = Raster::categorical(b, rows, cols, std::move(codes));
  } else if (kind == "continuous") {
    std::vector<float> values(n);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float)) {
      throw IoError("truncated payload in " + path);
    }
    for (float v : values) {
      if (!std::isfinite(v)) throw DataError("non-finite value in " + path);
    }
    raster = Raster::continuous(b, rows, cols, std::move(values));
  } else {
    throw IoError("unknown raster kind '" + kind + "' in " + path);
  }
  expect_eof(in, path);
  return raster;
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ozbias
