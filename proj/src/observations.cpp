#include "ozbias/observations.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ozbias/errors.hpp"

namespace ozbias {

void ObservationTable::validate() const {
  std::set<std::pair<std::string, Date>> seen;
  for (const auto& rec : records) {
    if (!std::isfinite(rec.o3_ppb) || rec.o3_ppb < 0.0) {
      throw DataError("station " + rec.station_id + " on " +
                      rec.date.to_string() + " has invalid o3 value");
    }
    if (!seen.insert({rec.station_id, rec.date}).second) {
      throw DataError("duplicate record for station " + rec.station_id +
                      " on " + rec.date.to_string());
    }
  }
}

ObservationTable ObservationTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty stations file " + path);
  if (line != "station_id,lat,lon,date,o3_ppb") {
    throw DataError("unexpected stations header in " + path);
  }
  ObservationTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 5 fields");
    }
    ObsRecord rec;
    rec.station_id = fields[0];
    try {
      rec.lat = std::stod(fields[1]);
      rec.lon = std::stod(fields[2]);
      rec.o3_ppb = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad number");
    }
    rec.date = Date::parse(fields[3]);
    table.records.push_back(std::move(rec));
  }
  table.validate();
  return table;
}

void ObservationTable::save_csv(const std::string& path) const {
  validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "station_id,lat,lon,date,o3_ppb\n";
  char buf[128];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%s,%.17g",
                  rec.station_id.c_str(), rec.lat, rec.lon,
                  rec.date.to_string().c_str(), rec.o3_ppb);
    out << buf << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ozbias
