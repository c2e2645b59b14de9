#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adia/errors.hpp"

namespace adia {

// Composite Simpson over uniformly spaced samples. Works for scalars,
// complex values and Eigen matrices alike. An odd interval count is closed
// with a 3/8 rule on the tail; a single interval degrades to the trapezoid.
template <class T>
T simpson_uniform(const std::vector<T>& f, double h) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size()) - 1;
    if (n < 1) throw InsufficientGrid("simpson_uniform: need at least two samples");
    if (n == 1) return static_cast<T>((f[0] + f[1]) * (h / 2.0));

    std::ptrdiff_t simpson_end = n;  // intervals covered by the 1/3 rule
    bool tail38 = false;
    if (n % 2 != 0) {
        if (n == 3) {
            simpson_end = 0;
        } else {
            simpson_end = n - 3;
        }
        tail38 = true;
    }

    T acc = f[0] * 0.0;
    if (simpson_end >= 2) {
        acc = f[0] * 1.0;
        for (std::ptrdiff_t i = 1; i < simpson_end; ++i)
            acc += f[static_cast<std::size_t>(i)] * ((i % 2 != 0) ? 4.0 : 2.0);
        acc += f[static_cast<std::size_t>(simpson_end)] * 1.0;
        acc = acc * (h / 3.0);
    }
    if (tail38) {
        const std::size_t b = static_cast<std::size_t>(n - 3);
        T tail = f[b] * 1.0 + f[b + 1] * 3.0 + f[b + 2] * 3.0 + f[b + 3] * 1.0;
        acc += tail * (3.0 * h / 8.0);
    }
    return acc;
}

// Composite Simpson for a callable integrand; `panels` is rounded up to an
// even count.
template <class F>
auto simpson(F&& f, double a, double b, int panels) -> decltype(f(a)) {
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    using T = decltype(f(a));
    T acc = f(a) * 1.0;
    for (int i = 1; i < panels; ++i)
        acc += f(a + i * h) * ((i % 2 != 0) ? 4.0 : 2.0);
    acc += f(b) * 1.0;
    return acc * (h / 3.0);
}

// Running trapezoid integral of sampled values; result[k] = integral up to t_k.
inline Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& t,
                                            const Eigen::VectorXd& f) {
    if (t.size() != f.size()) throw GridMismatch("cumulative_trapezoid: size mismatch");
    Eigen::VectorXd out(t.size());
    if (t.size() == 0) return out;
    out(0) = 0.0;
    for (Eigen::Index k = 1; k < t.size(); ++k)
        out(k) = out(k - 1) + 0.5 * (f(k) + f(k - 1)) * (t(k) - t(k - 1));
    return out;
}

// Simpson over a sampled series stored in an Eigen vector (uniform spacing).
inline double simpson_series(const Eigen::VectorXd& f, double h) {
    std::vector<double> v(f.data(), f.data() + f.size());
    return simpson_uniform(v, h);
}

// Spacing of a uniform grid; rejects non-uniform input.
inline double uniform_spacing(const Eigen::VectorXd& grid) {
    if (grid.size() < 2) throw InsufficientGrid("uniform_spacing: need two points");
    const double h = (grid(grid.size() - 1) - grid(0)) / static_cast<double>(grid.size() - 1);
    for (Eigen::Index k = 1; k < grid.size(); ++k)
        if (std::abs(grid(k) - grid(k - 1) - h) > 1e-9 * std::abs(h))
            throw ConfigError("uniform_spacing: grid is not uniform");
    return h;
}

}  // namespace adia
