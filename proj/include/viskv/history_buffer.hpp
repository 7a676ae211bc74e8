#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "viskv/errors.hpp"

namespace viskv {

/// Delay-aligned record of past states on a uniform time grid with
/// dt * n_per_delay == tau. Because the grid is aligned with the delay,
/// a state one delay interval back is always a stored entry; there is no
/// interpolation anywhere in the solvers.
///
/// Entries are ordered oldest first; index arithmetic is relative to the
/// newest entry (`lag(0)` is the newest, `lag(n_per_delay())` is the state
/// exactly one delay back).
template <class State>
class HistoryBuffer {
  public:
    HistoryBuffer(double tau, int n_per_delay, std::vector<State> initial)
        : tau_(tau), n_(n_per_delay), states_(std::move(initial)) {
        if (!(tau > 0.0)) throw DomainError("history buffer requires tau > 0");
        if (n_per_delay < 2) throw DomainError("history buffer requires n_per_delay >= 2");
        if (states_.size() != static_cast<std::size_t>(n_ + 1))
            throw ConfigError("history buffer must be initialized with n_per_delay + 1 samples");
        dt_ = tau / static_cast<double>(n_);
    }

    double dt() const { return dt_; }
    double tau() const { return tau_; }
    int n_per_delay() const { return n_; }
    std::size_t size() const { return states_.size(); }

    /// Time of the newest entry; the initial fill ends at t = 0.
    double head_time() const {
        return dt_ * static_cast<double>(static_cast<long long>(states_.size()) - 1 - n_);
    }

    const State& newest() const { return states_.back(); }

    /// State `steps_back` steps behind the newest entry.
    const State& lag(int steps_back) const {
        return states_[states_.size() - 1 - static_cast<std::size_t>(steps_back)];
    }

    /// State exactly one delay interval behind the newest entry.
    const State& delayed_value() const { return lag(n_); }

    void push(State s) { states_.push_back(std::move(s)); }

    const std::vector<State>& states() const { return states_; }

  private:
    double tau_;
    int n_;
    double dt_;
    std::vector<State> states_;
};

/// Fills a scalar buffer with N+1 samples of the prescribed history
/// phi at t = -tau, -tau + dt, ..., 0 with dt = tau/N.
inline HistoryBuffer<double> make_history_buffer(double tau, int n_per_delay,
                                                 const std::function<double(double)>& initial_history) {
    if (!(tau > 0.0)) throw DomainError("make_history_buffer requires tau > 0");
    if (n_per_delay < 2) throw DomainError("make_history_buffer requires n_per_delay >= 2");
    const double dt = tau / static_cast<double>(n_per_delay);
    std::vector<double> samples(static_cast<std::size_t>(n_per_delay) + 1);
    for (int i = 0; i <= n_per_delay; ++i) {
        const double t = dt * static_cast<double>(i - n_per_delay);
        const double v = initial_history(t);
        if (!std::isfinite(v)) throw NumericError("non-finite history sample");
        samples[static_cast<std::size_t>(i)] = v;
    }
    return HistoryBuffer<double>(tau, n_per_delay, std::move(samples));
}

} // namespace viskv
