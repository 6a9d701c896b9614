#include "ozbias/date.hpp"

#include <array>
#include <cstdio>

#include "ozbias/errors.hpp"

namespace ozbias {

namespace {

int days_in_month(int year, int month) {
  static const std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                              31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) return 29;
  return lengths[month - 1];
}

}  // namespace

bool Date::is_valid(int year, int month, int day) {
  if (month < 1 || month > 12) return false;
  if (day < 1 || day > days_in_month(year, month)) return false;
  return true;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::parse(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3 ||
      !is_valid(y, m, d)) {
    throw DataError("invalid date '" + iso + "' (expected YYYY-MM-DD)");
  }
  return Date{y, m, d};
}

Date Date::summer_day(int year, int n) {
  if (n < 0 || n >= 92) throw DataError("summer day index out of range");
  for (int month = 6; month <= 8; ++month) {
    int len = days_in_month(year, month);
    if (n < len) return Date{year, month, n + 1};
    n -= len;
  }
  throw DataError("summer day index out of range");
}

}  // namespace ozbias
