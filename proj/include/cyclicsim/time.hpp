#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace cyclicsim {

// All simulation arithmetic runs on integer nanoseconds; microseconds are
// the I/O unit (scenario files, reports, the paper-facing formulas).
using TimeNs = std::int64_t;
using RateBps = std::int64_t;

constexpr TimeNs kNsPerUs = 1000;

inline TimeNs us_to_ns(double us) { return static_cast<TimeNs>(std::llround(us * 1000.0)); }
inline double ns_to_us(TimeNs ns) { return static_cast<double>(ns) / 1000.0; }

// Wire time of a frame, rounded up to whole ns.
inline TimeNs tx_time_ns(std::int64_t wire_bytes, RateBps rate_bps) {
    const std::int64_t bits_scaled = wire_bytes * 8 * 1'000'000'000LL;
    return (bits_scaled + rate_bps - 1) / rate_bps;
}

// Fixed-point µs rendering (ns-exact, 3 decimals); keeps emitted files byte-stable.
std::string format_us(TimeNs ns);

}  // namespace cyclicsim
