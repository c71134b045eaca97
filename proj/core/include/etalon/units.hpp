#pragma once

// Unit helpers. Everything inside the library is SI (m, rad, Hz, W); the
// presentation units (mrad, mm, um, nm, GHz) exist only at the I/O boundary.
// Each scale factor is an exactly representable integer, so every conversion
// is a single correctly rounded multiply or divide.

namespace etalon::units {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact by definition

constexpr double mrad_to_rad(double mrad) { return mrad / 1e3; }
constexpr double rad_to_mrad(double rad) { return rad * 1e3; }

constexpr double mm_to_m(double mm) { return mm / 1e3; }
constexpr double m_to_mm(double m) { return m * 1e3; }

constexpr double um_to_m(double um) { return um / 1e6; }
constexpr double m_to_um(double m) { return m * 1e6; }

constexpr double nm_to_m(double nm) { return nm / 1e9; }
constexpr double m_to_nm(double m) { return m * 1e9; }

constexpr double ghz_to_hz(double ghz) { return ghz * 1e9; }
constexpr double hz_to_ghz(double hz) { return hz / 1e9; }

}  // namespace etalon::units
