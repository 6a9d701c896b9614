#pragma once

#include <string>
#include <vector>

#include "ozbias/date.hpp"

namespace ozbias {

struct ObsRecord {
  std::string station_id;
  double lat = 0.0;
  double lon = 0.0;
  Date date;
  double o3_ppb = 0.0;  // daytime 8-hour average
};

// Station observations; at most one record per (station, date), values
// finite and non-negative. CSV schema: station_id,lat,lon,date,o3_ppb.
struct ObservationTable {
  std::vector<ObsRecord> records;

  void validate() const;

  static ObservationTable load_csv(const std::string& path);
  void save_csv(const std::string& path) const;
};

}  // namespace ozbias
