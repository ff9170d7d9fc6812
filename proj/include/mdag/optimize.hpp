#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace mdag {

struct DescentOptions {
    int max_sweeps = 200;
    int line_iterations = 60;
    double initial_radius = 4.0;
    double min_radius = 1e-7;
    double stall_tolerance = 0.0;  // stop when a full sweep improves less than this
};

// Derivative-free coordinate descent: golden-section line searches on each
// coordinate within a shrinking trust radius. Suited to the smooth,
// low-dimensional least-squares objectives used for law fitting; callers
// handle multi-starts.
inline double coordinate_descent(std::vector<double>& x,
                                 const std::function<double(const std::vector<double>&)>& f,
                                 const DescentOptions& opts = {}) {
    constexpr double kGolden = 0.6180339887498949;
    double best = f(x);
    double radius = opts.initial_radius;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const double at_entry = best;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double lo = x[i] - radius;
            double hi = x[i] + radius;
            double m1 = hi - kGolden * (hi - lo);
            double m2 = lo + kGolden * (hi - lo);
            auto probe = [&](double v) {
                const double old = x[i];
                x[i] = v;
                const double r = f(x);
                x[i] = old;
                return r;
            };
            double f1 = probe(m1);
            double f2 = probe(m2);
            for (int it = 0; it < opts.line_iterations; ++it) {
                if (f1 <= f2) {
                    hi = m2;
                    m2 = m1;
                    f2 = f1;
                    m1 = hi - kGolden * (hi - lo);
                    f1 = probe(m1);
                } else {
                    lo = m1;
                    m1 = m2;
                    f1 = f2;
                    m2 = lo + kGolden * (hi - lo);
                    f2 = probe(m2);
                }
            }
            const double cand = f1 <= f2 ? m1 : m2;
            const double fc = f1 <= f2 ? f1 : f2;
            if (fc < best) {
                x[i] = cand;
                best = fc;
            }
        }
        if (at_entry - best <= opts.stall_tolerance) {
            radius *= 0.25;
            if (radius < opts.min_radius) break;
        }
    }
    return best;
}

}  // namespace mdag
