#include "cyclicsim/time.hpp"

#include <cstdio>

namespace cyclicsim {

std::string format_us(TimeNs ns) {
    const bool neg = ns < 0;
    const TimeNs abs = neg ? -ns : ns;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", neg ? "-" : "",
                  static_cast<long long>(abs / 1000), static_cast<long long>(abs % 1000));
    return buf;
}

}  // namespace cyclicsim
