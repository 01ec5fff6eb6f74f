#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace firerisk {

// State postal code -> 2-digit FIPS prefix (ANSI FIPS 5-2).
inline const std::map<std::string, std::string>& state_fips() {
    static const std::map<std::string, std::string> m = {
        {"AL", "01"}, {"AK", "02"}, {"AZ", "04"}, {"AR", "05"}, {"CA", "06"}, {"CO", "08"},
        {"CT", "09"}, {"DE", "10"}, {"DC", "11"}, {"FL", "12"}, {"GA", "13"}, {"HI", "15"},
        {"ID", "16"}, {"IL", "17"}, {"IN", "18"}, {"IA", "19"}, {"KS", "20"}, {"KY", "21"},
        {"LA", "22"}, {"ME", "23"}, {"MD", "24"}, {"MA", "25"}, {"MI", "26"}, {"MN", "27"},
        {"MS", "28"}, {"MO", "29"}, {"MT", "30"}, {"NE", "31"}, {"NV", "32"}, {"NH", "33"},
        {"NJ", "34"}, {"NM", "35"}, {"NY", "36"}, {"NC", "37"}, {"ND", "38"}, {"OH", "39"},
        {"OK", "40"}, {"OR", "41"}, {"PA", "42"}, {"RI", "44"}, {"SC", "45"}, {"SD", "46"},
        {"TN", "47"}, {"TX", "48"}, {"UT", "49"}, {"VT", "50"}, {"VA", "51"}, {"WA", "53"},
        {"WV", "54"}, {"WI", "55"}, {"WY", "56"},
    };
    return m;
}

// Census Bureau four-region assignment.
inline const std::map<std::string, std::string>& census_region() {
    static const std::map<std::string, std::string> m = {
        {"CT", "Northeast"}, {"ME", "Northeast"}, {"MA", "Northeast"}, {"NH", "Northeast"},
        {"RI", "Northeast"}, {"VT", "Northeast"}, {"NJ", "Northeast"}, {"NY", "Northeast"},
        {"PA", "Northeast"},
        {"IL", "Midwest"},   {"IN", "Midwest"},   {"MI", "Midwest"},   {"OH", "Midwest"},
        {"WI", "Midwest"},   {"IA", "Midwest"},   {"KS", "Midwest"},   {"MN", "Midwest"},
        {"MO", "Midwest"},   {"NE", "Midwest"},   {"ND", "Midwest"},   {"SD", "Midwest"},
        {"DE", "South"},     {"FL", "South"},     {"GA", "South"},     {"MD", "South"},
        {"NC", "South"},     {"SC", "South"},     {"VA", "South"},     {"DC", "South"},
        {"WV", "South"},     {"AL", "South"},     {"KY", "South"},     {"MS", "South"},
        {"TN", "South"},     {"AR", "South"},     {"LA", "South"},     {"OK", "South"},
        {"TX", "South"},
        {"AZ", "West"},      {"CO", "West"},      {"ID", "West"},      {"MT", "West"},
        {"NV", "West"},      {"NM", "West"},      {"UT", "West"},      {"WY", "West"},
        {"AK", "West"},      {"CA", "West"},      {"HI", "West"},      {"OR", "West"},
        {"WA", "West"},
    };
    return m;
}

inline std::string season_of_month(int month) {
    switch (month) {
    case 12: case 1: case 2: return "winter";
    case 3: case 4: case 5: return "spring";
    case 6: case 7: case 8: return "summer";
    default: return "autumn";
    }
}

inline const std::array<std::string, 4>& season_names() {
    static const std::array<std::string, 4> s = {"winter", "spring", "summer", "autumn"};
    return s;
}

inline const std::array<std::string, 4>& region_names() {
    static const std::array<std::string, 4> r = {"Northeast", "Midwest", "South", "West"};
    return r;
}

} // namespace firerisk
