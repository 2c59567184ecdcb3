#ifndef IONTRAP_CONSTANTS_HPP
#define IONTRAP_CONSTANTS_HPP

#include <stdexcept>

namespace iontrap {

// All frequencies in this library are ordinary frequencies (Hz); the angular
// 2*pi factors are applied inside the dynamics routines.

constexpr double kAtomicMassKg = 1.66053906660e-27;
constexpr double kElectronMassU = 5.48579909065e-4;

// Singly ionized 171Yb (atomic mass 170.936330 u minus one electron).
constexpr double kYb171IonMassKg = (170.936330 - kElectronMassU) * kAtomicMassKg;

struct PhysicalConstants {
  // g_F * mu_B / h for g_F = 1; converts magnetic field to Zeeman shift.
  double zeeman_hz_per_t = 1.3996e10;
  // e^2 / (4 pi eps0), N m^2.
  double coulomb_nm2 = 2.3070775523417355e-28;
  // |0> <-> |0'> hyperfine splitting at zero field, Hz.
  double hyperfine_hz = 12.642812118e9;

  void validate() const {
    if (!(zeeman_hz_per_t > 0.0))
      throw std::invalid_argument("PhysicalConstants: zeeman_hz_per_t must be > 0");
    if (!(coulomb_nm2 > 0.0))
      throw std::invalid_argument("PhysicalConstants: coulomb_nm2 must be > 0");
    if (!(hyperfine_hz > 0.0))
      throw std::invalid_argument("PhysicalConstants: hyperfine_hz must be > 0");
  }
};

}  // namespace iontrap

#endif  // IONTRAP_CONSTANTS_HPP
