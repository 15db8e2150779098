#include "mfc/state_space.hpp"

#include <stdexcept>
#include <string>

namespace mfc {

StateSpace::StateSpace(int t_amb, int t_max)
    : t_amb_(t_amb), t_max_(t_max), n_temps_(t_max - t_amb + 1) {
    if (t_max <= t_amb) {
        throw std::invalid_argument("StateSpace: t_max must exceed t_amb");
    }
}

int StateSpace::encode(int mode, int temp) const {
    if (mode != 0 && mode != 1) {
        throw std::out_of_range("StateSpace::encode: mode must be 0 or 1");
    }
    if (temp < t_amb_ || temp > t_max_) {
        throw std::out_of_range("StateSpace::encode: temperature " + std::to_string(temp) +
                                " outside [" + std::to_string(t_amb_) + ", " +
                                std::to_string(t_max_) + "]");
    }
    return mode * n_temps_ + (temp - t_amb_);
}

std::pair<int, int> StateSpace::decode(int index) const {
    if (index < 0 || index >= size()) {
        throw std::out_of_range("StateSpace::decode: index out of range");
    }
    return {mode_of(index), temp_of(index)};
}

}  // namespace mfc
