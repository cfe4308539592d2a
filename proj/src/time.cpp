#include "linkaudit/time.hpp"

#include <array>
#include <cstdio>

namespace linkaudit {
namespace {

using namespace std::chrono;

constexpr std::array<std::string_view, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                                       "Thu", "Fri", "Sat"};
constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Reads exactly `width` decimal digits starting at `pos`.
std::optional<int> read_digits(std::string_view s, std::size_t pos, std::size_t width) {
  if (pos + width > s.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

std::optional<Date> make_date(int y, int m, int d) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::optional<UtcTime> make_time(Date d, int hh, int mm, int ss) {
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return UtcTime{d} + hours{hh} + minutes{mm} + seconds{ss};
}

struct Civil {
  int year, month, day, hour, minute, second;
  unsigned weekday;
};

Civil to_civil(UtcTime t) {
  const auto d = floor<days>(t);
  const year_month_day ymd{d};
  const hh_mm_ss hms{t - d};
  return {int(ymd.year()),
          int(unsigned(ymd.month())),
          int(unsigned(ymd.day())),
          int(hms.hours().count()),
          int(hms.minutes().count()),
          int(hms.seconds().count()),
          weekday{d}.c_encoding()};
}

}  // namespace

std::optional<PublicationDate> parse_publication_date(std::string_view text) {
  if (text.size() != 7 && text.size() != 10) return std::nullopt;
  const auto y = read_digits(text, 0, 4);
  const auto m = read_digits(text, 5, 2);
  if (!y || !m || text[4] != '-') return std::nullopt;
  if (text.size() == 7) {
    const auto d = make_date(*y, *m, 1);
    if (!d) return std::nullopt;
    return PublicationDate{*d, DatePrecision::Month};
  }
  const auto dd = read_digits(text, 8, 2);
  if (!dd || text[7] != '-') return std::nullopt;
  const auto d = make_date(*y, *m, *dd);
  if (!d) return std::nullopt;
  return PublicationDate{*d, DatePrecision::Day};
}

std::string format_iso_date(Date day) {
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

std::optional<UtcTime> parse_iso_datetime(std::string_view text) {
  // YYYY-MM-DDThh:mm:ssZ
  if (text.size() != 20) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' || text[16] != ':' ||
      text[19] != 'Z')
    return std::nullopt;
  const auto y = read_digits(text, 0, 4), mo = read_digits(text, 5, 2), d = read_digits(text, 8, 2);
  const auto h = read_digits(text, 11, 2), mi = read_digits(text, 14, 2), s = read_digits(text, 17, 2);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  const auto date = make_date(*y, *mo, *d);
  if (!date) return std::nullopt;
  return make_time(*date, *h, *mi, *s);
}

std::string format_iso_datetime(UtcTime t) {
  const Civil c = to_civil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

std::optional<UtcTime> parse_http_date(std::string_view text) {
  // Wed, 01 Jun 2005 00:00:00 GMT
  if (text.size() != 29) return std::nullopt;
  bool weekday_ok = false;
  for (auto name : kWeekdays) weekday_ok = weekday_ok || text.substr(0, 3) == name;
  if (!weekday_ok || text.substr(3, 2) != ", " || text[7] != ' ' || text[11] != ' ' ||
      text[16] != ' ' || text[19] != ':' || text[22] != ':' || text.substr(25) != " GMT")
    return std::nullopt;
  int month_index = 0;
  for (; month_index < 12; ++month_index)
    if (text.substr(8, 3) == kMonths[month_index]) break;
  if (month_index == 12) return std::nullopt;
  const auto d = read_digits(text, 5, 2), y = read_digits(text, 12, 4);
  const auto h = read_digits(text, 17, 2), mi = read_digits(text, 20, 2), s = read_digits(text, 23, 2);
  if (!d || !y || !h || !mi || !s) return std::nullopt;
  const auto date = make_date(*y, month_index + 1, *d);
  if (!date) return std::nullopt;
  return make_time(*date, *h, *mi, *s);
}

std::string format_http_date(UtcTime t) {
  const Civil c = to_civil(t);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d GMT",
                kWeekdays[c.weekday].data(), c.day, kMonths[c.month - 1].data(), c.year, c.hour,
                c.minute, c.second);
  return buf;
}

std::string format_compact_timestamp(UtcTime t) {
  const Civil c = to_civil(t);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d%02d%02d%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

std::optional<UtcTime> parse_compact_timestamp(std::string_view text) {
  if (text.size() != 14) return std::nullopt;
  const auto y = read_digits(text, 0, 4), mo = read_digits(text, 4, 2), d = read_digits(text, 6, 2);
  const auto h = read_digits(text, 8, 2), mi = read_digits(text, 10, 2), s = read_digits(text, 12, 2);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  const auto date = make_date(*y, *mo, *d);
  if (!date) return std::nullopt;
  return make_time(*date, *h, *mi, *s);
}

std::int64_t floor_days_between(UtcTime from, UtcTime to) {
  return floor<days>(to - from).count();
}

}  // namespace linkaudit
