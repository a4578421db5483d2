#pragma once

// Complex linear algebra for single- and two-photon polarization states:
// Jones vectors and matrices, tensor products, projections, the bell_phi
// state family, Werner mixtures and the visibility -> fidelity bound.
//
// Basis conventions used throughout:
//   single photon: (H, V)
//   photon pair:   (HH, HV, VH, VV)
// States are physical rays; "equal up to global phase" means
// |<s1|s2>|^2 = 1 within 1e-10.

#include <array>
#include <complex>

namespace epsim {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct JonesVector {
    Complex amp_h{0.0, 0.0};
    Complex amp_v{0.0, 0.0};

    double norm2() const { return std::norm(amp_h) + std::norm(amp_v); }
    JonesVector normalized() const;
};

// <a|b>
Complex inner(const JonesVector& a, const JonesVector& b);

JonesVector jones_h();
JonesVector jones_v();
JonesVector jones_diag();      // |+> = (|H>+|V>)/sqrt2
JonesVector jones_antidiag();  // |-> = (|H>-|V>)/sqrt2

// 2x2 complex operator on Jones vectors, row-major (hh, hv, vh, vv).
struct JonesMatrix {
    std::array<Complex, 4> m{};

    static JonesMatrix identity();
    JonesVector apply(const JonesVector& in) const;
    JonesMatrix operator*(const JonesMatrix& rhs) const;
    bool is_unitary(double tol = 1e-12) const;
};

// Rotated linear retarder: R(axis) * diag(1, e^{i*retardance}) * R(-axis).
// retardance = pi gives a half-wave plate; a fixed 45 degree axis with
// variable retardance models a liquid-crystal retarder.
// Throws std::invalid_argument on non-finite input.
JonesMatrix waveplate(double retardance, double fast_axis_angle);

inline JonesMatrix half_wave_plate(double fast_axis_angle) {
    return waveplate(kPi, fast_axis_angle);
}

// Liquid-crystal phase retarder at 45 degrees.
inline JonesMatrix lc_retarder(double delta) { return waveplate(delta, kPi / 4.0); }

struct TwoPhotonState {
    // Amplitudes over (HH, HV, VH, VV).
    std::array<Complex, 4> amps{};

    double norm2() const;
    TwoPhotonState normalized() const;
};

// |a> tensor |b>
TwoPhotonState product_state(const JonesVector& a, const JonesVector& b);

// <s1|s2>
Complex overlap(const TwoPhotonState& s1, const TwoPhotonState& s2);

// True when |<s1|s2>|^2 = 1 within tol (ray equality).
bool same_ray(const TwoPhotonState& s1, const TwoPhotonState& s2, double tol = 1e-10);

// (m_a tensor m_b) |s>
TwoPhotonState tensor_apply(const JonesMatrix& m_a, const JonesMatrix& m_b,
                            const TwoPhotonState& s);

// |<bra_a, bra_b|s>|^2. All inputs must be normalized within 1e-9,
// otherwise throws std::invalid_argument.
double project(const TwoPhotonState& s, const JonesVector& bra_a, const JonesVector& bra_b);

// (|++> + e^{i phi}|-->)/sqrt2 expressed in the (HH, HV, VH, VV) basis.
TwoPhotonState bell_phi(double phi);

// 4x4 complex Hermitian operator, row-major over (HH, HV, VH, VV).
struct DensityMatrix2Q {
    std::array<Complex, 16> m{};

    Complex at(int row, int col) const { return m[static_cast<size_t>(row) * 4 + col]; }
    double trace_real() const;
    bool is_hermitian(double tol = 1e-12) const;
    // <s|rho|s>
    double expectation(const TwoPhotonState& s) const;
};

// v |phi><phi| + (1-v)/4 * I, built around bell_phi(0) by default.
// Throws std::invalid_argument for v outside [0, 1].
DensityMatrix2Q werner(double v);
DensityMatrix2Q werner(double v, const TwoPhotonState& target);

// Worst-case two-qubit fidelity from the Bell-state visibility v_s of a
// Werner mixture:  F = ((3/2) sqrt(v) + (1/2) sqrt(4 - 3 v))^2 / 4.
// Throws std::invalid_argument outside [0, 1].
double fidelity_bound(double v_s);

// Plain Werner-state overlap with the Bell target, (1 + 3 v)/4. Kept as a
// separate diagnostic because the two formulas disagree numerically and
// reports print both.
double werner_overlap(double v);

} // namespace epsim
