#pragma once
#include <compare>
#include <cstdint>
#include <string>

namespace ltm {

// Civil-calendar day arithmetic (proleptic Gregorian, no time zones).
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

// Simulation time at minute resolution: minutes since 1970-01-01T00:00 UTC.
class Timestamp {
public:
    Timestamp() = default;

    static Timestamp from_minutes(std::int64_t minutes) { return Timestamp(minutes); }
    static Timestamp civil(int year, unsigned month, unsigned day,
                           unsigned hour = 0, unsigned minute = 0);
    // Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM" and "YYYY-MM-DDTHH:MM:SS"
    // (seconds must be zero; the clock is minute-grained).
    static Timestamp parse(const std::string& iso);

    std::int64_t minutes() const { return minutes_; }

    Timestamp start_of_day() const;
    Timestamp at(unsigned hour, unsigned minute) const;
    Timestamp add_days(std::int64_t n) const { return Timestamp(minutes_ + n * 1440); }
    Timestamp add_minutes(std::int64_t n) const { return Timestamp(minutes_ + n); }

    std::string to_string() const;   // YYYY-MM-DDTHH:MM:SS
    std::string date_string() const; // YYYY-MM-DD

    auto operator<=>(const Timestamp&) const = default;

private:
    explicit Timestamp(std::int64_t minutes) : minutes_(minutes) {}
    std::int64_t minutes_ = 0;
};

// Fractional days from `earlier` to `later`; negative when `later` precedes it.
inline double delta_days(Timestamp later, Timestamp earlier) {
    return static_cast<double>(later.minutes() - earlier.minutes()) / 1440.0;
}

// Whole calendar days between two timestamps' dates.
inline std::int64_t calendar_days_between(Timestamp from, Timestamp to) {
    return (to.start_of_day().minutes() - from.start_of_day().minutes()) / 1440;
}

} // namespace ltm
