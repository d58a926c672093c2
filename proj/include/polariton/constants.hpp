#pragma once

// Physical constants (SI, CODATA 2018 exact or recommended values).
//
// Interface frequencies are ordinary frequencies in THz.  Every Hamiltonian
// formula in this library is homogeneous of degree one in frequency, so the
// angular/ordinary convention cancels; thermal factors use h*f/(k_B*T).

namespace polariton::constants {

inline constexpr double speed_of_light = 2.99792458e8;       // m/s
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double boltzmann = 1.380649e-23;            // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double vacuum_impedance = 376.730313668;    // Ohm
inline constexpr double terahertz = 1e12;                    // Hz
inline constexpr double pi = 3.14159265358979323846;

}  // namespace polariton::constants
