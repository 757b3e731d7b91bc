#pragma once

// Dormand-Prince 5(4) with FSAL and a standard step-size controller.
// Header-only, private to the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace pcone::detail {

using State = std::array<double, 2>;

struct Dopri5Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_init = 1e-4;
    double h_min = 1e-14;
    double h_max = 0.05;
    long max_steps = 2000000;
};

enum class StepStatus { Reached, Stopped, StepUnderflow, MaxSteps, NonFinite };

template <class Rhs>
class Dopri5 {
public:
    Dopri5(Rhs rhs, Dopri5Options opt) : f_(std::move(rhs)), opt_(opt) {}

    // one explicit step of size h (no error control); used for root polishing
    State step(double t, const State& y, double h) const {
        State k1 = f_(t, y);
        State err;
        State y5;
        State k7;
        raw_step(t, y, h, k1, y5, err, k7);
        return y5;
    }

    // Adaptive integration from (t, y) towards t_end without overshooting.
    // on_step(t0, y0, t1, y1) returns true to stop after the accepted step.
    template <class OnStep>
    StepStatus integrate(double& t, State& y, double t_end, OnStep&& on_step) {
        double dir = t_end >= t ? 1.0 : -1.0;
        double h = std::min(std::abs(h_), opt_.h_max) * dir;
        State k1 = f_(t, y);
        long n = 0;
        while (dir * (t_end - t) > 0.0) {
            if (++n > opt_.max_steps) return StepStatus::MaxSteps;
            bool last = false;
            if (dir * (t + h - t_end) >= 0.0) {
                h = t_end - t;
                last = true;
            }
            State y5, err, k7;
            raw_step(t, y, h, k1, y5, err, k7);
            double e = 0.0;
            bool finite = true;
            for (int i = 0; i < 2; ++i) {
                if (!std::isfinite(y5[i])) finite = false;
                double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                e += (err[i] / sc) * (err[i] / sc);
            }
            e = std::sqrt(e / 2.0);
            if (!finite || !std::isfinite(e)) e = 1e10;
            if (e <= 1.0) {
                double t_new = last ? t_end : t + h;
                bool stop = on_step(t, y, t_new, y5);
                t = t_new;
                y = y5;
                k1 = k7;
                double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
                if (!last) h_ = std::abs(h) * fac;
                h = std::min(std::abs(h) * fac, opt_.h_max) * dir;
                if (stop) return StepStatus::Stopped;
            } else {
                if (!finite && std::abs(h) <= opt_.h_min) return StepStatus::NonFinite;
                double fac = std::clamp(0.9 * std::pow(e, -0.2), 0.1, 1.0);
                h *= fac;
                if (std::abs(h) < opt_.h_min) return StepStatus::StepUnderflow;
            }
        }
        return StepStatus::Reached;
    }

    const Rhs& rhs() const { return f_; }

private:
    void raw_step(double t, const State& y, double h, const State& k1, State& y5, State& err,
                  State& k7) const {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        State yt, k2, k3, k4, k5, k6;
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = f_(t + c2 * h, yt);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f_(t + c3 * h, yt);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f_(t + c4 * h, yt);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f_(t + c5 * h, yt);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f_(t + h, yt);
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f_(t + h, y5);
        for (int i = 0; i < 2; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    Rhs f_;
    Dopri5Options opt_;
    double h_ = opt_.h_init;
};

}  // namespace pcone::detail
