#include "mfc/tables.hpp"

#include <cmath>

namespace mfc {

double XaTable::sum() const {
    double total = 0.0;
    for (double e : v) total += e;
    return total;
}

double XaTable::min_entry() const {
    if (v.empty()) return 0.0;
    double m = v.front();
    for (double e : v) m = std::min(m, e);
    return m;
}

bool XaTable::rows_stochastic(double tol) const {
    for (int x = 0; x < n_states; ++x) {
        double row = 0.0;
        for (int a = 0; a < n_actions; ++a) {
            double e = at(x, a);
            if (e < -tol) return false;
            row += e;
        }
        if (std::fabs(row - 1.0) > tol) return false;
    }
    return true;
}

double l1_distance(const XaTable& a, const XaTable& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) d += std::fabs(a.v[i] - b.v[i]);
    return d;
}

bool KernelSlice::rows_stochastic(double tol) const {
    for (int x = 0; x < n_states; ++x) {
        for (int a = 0; a < n_actions; ++a) {
            double row = 0.0;
            for (int next = 0; next < n_states; ++next) {
                double e = at(x, a, next);
                if (e < -tol || e > 1.0 + tol) return false;
                row += e;
            }
            if (std::fabs(row - 1.0) > tol) return false;
        }
    }
    return true;
}

bool PolicySequence::rows_stochastic(double tol) const {
    for (const XaTable& s : steps) {
        if (!s.rows_stochastic(tol)) return false;
    }
    return true;
}

bool PolicySequence::strictly_positive() const {
    for (const XaTable& s : steps) {
        if (s.min_entry() <= 0.0) return false;
    }
    return true;
}

PolicySequence uniform_policy(int n_states, int n_actions, int horizon) {
    PolicySequence pi;
    pi.steps.assign(static_cast<std::size_t>(horizon),
                    XaTable(n_states, n_actions, 1.0 / n_actions));
    return pi;
}

bool TimedKernel::rows_stochastic(double tol) const {
    for (const KernelSlice& s : steps) {
        if (!s.rows_stochastic(tol)) return false;
    }
    return true;
}

}  // namespace mfc
