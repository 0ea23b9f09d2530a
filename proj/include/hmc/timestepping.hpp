#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "hmc/errors.hpp"

namespace hmc {

/// BDF_m weights w_k with d/dt phi^n ~ (1/dt) sum_k w_k phi^{n-k}.
inline std::array<double, 5> bdf_coefficients(int m) {
    switch (m) {
    case 1: return {1.0, -1.0, 0.0, 0.0, 0.0};
    case 2: return {1.5, -2.0, 0.5, 0.0, 0.0};
    case 3: return {11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0, 0.0};
    case 4: return {25.0 / 12.0, -4.0, 3.0, -4.0 / 3.0, 0.25};
    default: throw InvalidArgument("BDF order must be 1..4");
    }
}

/// Snapshots ordered newest first, capped at `capacity`.
template <class T>
class HistoryRing {
public:
    explicit HistoryRing(std::size_t capacity = 5) : capacity_(capacity) {}
    void push(T value) {
        data_.push_front(std::move(value));
        if (data_.size() > capacity_) data_.pop_back();
    }
    const T& operator[](std::size_t k) const { return data_.at(k); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    void clear() { data_.clear(); }

private:
    std::size_t capacity_;
    std::deque<T> data_;
};

/// history[0] = phi^n, history[1] = phi^{n-1}, ...
template <class T>
T bdf_derivative(int m, const HistoryRing<T>& history, double dt) {
    const auto w = bdf_coefficients(m);
    if (history.size() < static_cast<std::size_t>(m + 1))
        throw StateError("BDF" + std::to_string(m) + " needs " + std::to_string(m + 1) + " snapshots, have " +
                         std::to_string(history.size()));
    T out = w[0] * history[0];
    for (int k = 1; k <= m; ++k) out = out + w[k] * history[k];
    return out / dt;
}

namespace detail {
inline bool all_finite(double v) { return std::isfinite(v); }
template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) { return v.allFinite(); }
} // namespace detail

/// Explicit RK1 (Euler) or classical RK4 step of y' = f(t, y).
template <class T>
T rk_integrate(int order, const std::function<T(double, const T&)>& f, const T& y, double t, double dt) {
    auto check = [](const T& k) {
        if (!detail::all_finite(k)) throw DomainError("non-finite Runge-Kutta stage");
        return k;
    };
    if (order == 1) return y + dt * check(f(t, y));
    if (order != 4) throw InvalidArgument("RK order must be 1 or 4");
    const T k1 = dt * check(f(t, y));
    const T k2 = dt * check(f(t + 0.5 * dt, y + 0.5 * k1));
    const T k3 = dt * check(f(t + 0.5 * dt, y + 0.5 * k2));
    const T k4 = dt * check(f(t + dt, y + k3));
    return y + k1 / 6.0 + k2 / 3.0 + k3 / 3.0 + k4 / 6.0;
}

/// Linear extrapolation of phi to t^{n+1}; n = 0 returns phi^0.
template <class T>
T extrapolate(const T& now, const T& prev, double dt_now, double dt_prev, int n) {
    if (n < 0) throw InvalidArgument("extrapolate: n must be non-negative");
    if (n == 0) return now;
    if (!(dt_prev > 0)) throw InvalidArgument("extrapolate: previous step must be positive");
    const double r = dt_now / dt_prev;
    return (1.0 + r) * now - r * prev;
}

/// dt = min(CFL h_l / ||q||_inf, dt_max).
class StepController {
public:
    StepController(double cfl, double dt_max, double h_l) : cfl_(cfl), dt_max_(dt_max), h_l_(h_l) {
        if (!(cfl > 0 && dt_max > 0 && h_l > 0)) throw InvalidArgument("step controller needs positive CFL, dt_max, h_l");
    }
    double next(double q_inf) const {
        if (!(q_inf > 0)) return dt_max_;
        return std::min(cfl_ * h_l_ / q_inf, dt_max_);
    }
    double cfl() const { return cfl_; }
    double dt_max() const { return dt_max_; }
    double h_l() const { return h_l_; }

private:
    double cfl_, dt_max_, h_l_;
};

} // namespace hmc
