#pragma once

#include <compare>
#include <string>

namespace ozbias {

// Calendar day. Stored as plain fields; ISO "YYYY-MM-DD" on disk.
struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  bool is_summer() const { return month >= 6 && month <= 8; }
  std::string to_string() const;

  static Date parse(const std::string& iso);
  static bool is_valid(int year, int month, int day);

  // n-th day (0-based) of June-August of `year`; n in [0, 92).
  static Date summer_day(int year, int n);
};

}  // namespace ozbias
