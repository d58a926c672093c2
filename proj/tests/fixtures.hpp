#pragma once

#include "polariton/model.hpp"

#include <random>
#include <vector>

namespace fixture {

inline polariton::HybridSystem two_mode(double omega_c, double ratio1, double ratio2, double temperature = 300.0,
                                        double w1 = 0.96, double w2 = 1.9) {
    return polariton::HybridSystem(polariton::CavityMode{omega_c, std::nullopt},
                                   {{"TO1", w1, ratio1 * w1}, {"TO2", w2, ratio2 * w2}}, temperature);
}

// Bulk film with nu/omega = 0.56 and 0.84.
inline polariton::HybridSystem bulk_main(double omega_c, double temperature = 300.0) {
    return two_mode(omega_c, 0.56, 0.84, temperature);
}

// Bulk film with nu/omega = 0.56 and 0.6.
inline polariton::HybridSystem bulk_alt(double omega_c, double temperature = 300.0) {
    return two_mode(omega_c, 0.56, 0.6, temperature);
}

inline polariton::HybridSystem layered(double omega_c, double temperature = 300.0) {
    return two_mode(omega_c, 0.26, 0.62, temperature, 1.09, 2.0);
}

inline polariton::HybridSystem single(double omega, double omega_c, double nu, double temperature = 300.0) {
    return polariton::HybridSystem(polariton::CavityMode{omega_c, std::nullopt}, {{"TO", omega, nu}}, temperature);
}

// omega, nu, omega_c uniform in [0.1, 3] THz.
inline polariton::HybridSystem random_two_mode(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 3.0);
    const double wc = u(rng);
    return polariton::HybridSystem(polariton::CavityMode{wc, std::nullopt},
                                   {{"TO1", u(rng), u(rng)}, {"TO2", u(rng), u(rng)}}, 300.0);
}

}  // namespace fixture
