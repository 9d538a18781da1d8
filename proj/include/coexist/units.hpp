#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace coexist {

/// Simulated time. Integer nanoseconds keep event ordering exact.
using Time = std::chrono::nanoseconds;

using namespace std::chrono_literals;

inline double to_us(Time t) { return static_cast<double>(t.count()) / 1e3; }
inline double to_seconds(Time t) { return static_cast<double>(t.count()) / 1e9; }
inline Time from_us(double us) { return Time(static_cast<std::int64_t>(std::llround(us * 1e3))); }
inline Time from_seconds(double s) { return Time(static_cast<std::int64_t>(std::llround(s * 1e9))); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace coexist
