#pragma once

#include <utility>

namespace mfc {

// Enumeration of heater states (mode, temperature): mode 0 = OFF, 1 = ON,
// temperatures are whole degrees Celsius in [t_amb, t_max] inclusive.
// Index layout: OFF block first, then ON block, temperatures ascending,
// so index = mode * n_temps + (temp - t_amb). The layout is fixed so that
// serialized tables are comparable across runs.
class StateSpace {
  public:
    StateSpace(int t_amb, int t_max);

    int size() const { return 2 * n_temps_; }
    int n_temps() const { return n_temps_; }
    int t_amb() const { return t_amb_; }
    int t_max() const { return t_max_; }

    int encode(int mode, int temp) const;  // throws std::out_of_range on bad input
    std::pair<int, int> decode(int index) const;

    int mode_of(int index) const { return index / n_temps_; }
    int temp_of(int index) const { return t_amb_ + index % n_temps_; }

  private:
    int t_amb_;
    int t_max_;
    int n_temps_;
};

}  // namespace mfc
