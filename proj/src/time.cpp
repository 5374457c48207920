#include "ltm/time.hpp"

#include <cstdio>

#include "ltm/errors.hpp"

namespace ltm {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp < 10 ? mp + 3 : mp - 9;
    year = static_cast<int>(y + (month <= 2));
}

Timestamp Timestamp::civil(int year, unsigned month, unsigned day,
                           unsigned hour, unsigned minute) {
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59) {
        fail(ErrorCode::InvalidTimestamp, "civil components out of range");
    }
    return Timestamp(days_from_civil(year, month, day) * 1440 +
                     static_cast<std::int64_t>(hour) * 60 + minute);
}

Timestamp Timestamp::parse(const std::string& iso) {
    int y = 0;
    unsigned mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
    int n = std::sscanf(iso.c_str(), "%d-%u-%uT%u:%u:%u", &y, &mo, &d, &hh, &mm, &ss);
    if (n != 3 && n != 5 && n != 6) {
        fail(ErrorCode::InvalidTimestamp, "unparseable timestamp '" + iso + "'");
    }
    if (n == 6 && ss != 0) {
        fail(ErrorCode::InvalidTimestamp, "sub-minute timestamp '" + iso + "'");
    }
    if (n == 3) {
        hh = mm = 0;
    }
    return civil(y, mo, d, hh, mm);
}

Timestamp Timestamp::start_of_day() const {
    std::int64_t m = minutes_;
    // floor toward minus infinity so pre-epoch times land on their own day
    std::int64_t day = (m >= 0) ? m / 1440 : -(((-m) + 1439) / 1440);
    return Timestamp(day * 1440);
}

Timestamp Timestamp::at(unsigned hour, unsigned minute) const {
    return Timestamp(start_of_day().minutes_ + static_cast<std::int64_t>(hour) * 60 + minute);
}

std::string Timestamp::to_string() const {
    const Timestamp sod = start_of_day();
    int y;
    unsigned mo, d;
    civil_from_days(sod.minutes_ / 1440, y, mo, d);
    const std::int64_t rem = minutes_ - sod.minutes_;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:00", y, mo, d,
                  static_cast<int>(rem / 60), static_cast<int>(rem % 60));
    return buf;
}

std::string Timestamp::date_string() const {
    int y;
    unsigned mo, d;
    civil_from_days(start_of_day().minutes_ / 1440, y, mo, d);
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, mo, d);
    return buf;
}

} // namespace ltm
