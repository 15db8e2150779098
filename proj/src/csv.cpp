#include "mfc/csv.hpp"

#include <charconv>

namespace mfc {

std::string csv_num(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace mfc
