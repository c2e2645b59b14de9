#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace adia {

// Seeded generator with uniform/normal draws built directly from the mt19937
// bit stream, so sequences are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint32_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        const std::uint64_t bits = (static_cast<std::uint64_t>(gen_()) << 32) | gen_();
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Random Hermitian matrix with O(1) spectral scale.
    Eigen::MatrixXcd hermitian(int dim) {
        Eigen::MatrixXcd g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                g(i, j) = std::complex<double>(normal(), normal());
        return (g + g.adjoint()).eval() / (2.0 * std::sqrt(static_cast<double>(dim)));
    }

    Eigen::VectorXcd unit_vector(int dim) {
        Eigen::VectorXcd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = std::complex<double>(normal(), normal());
        return v / v.norm();
    }

  private:
    std::mt19937 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace adia
