#include "epsim/polarization.hpp"

#include <cmath>
#include <stdexcept>

namespace epsim {

namespace {

bool finite(const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

} // namespace

JonesVector JonesVector::normalized() const {
    const double n = std::sqrt(norm2());
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a null Jones vector");
    return {amp_h / n, amp_v / n};
}

Complex inner(const JonesVector& a, const JonesVector& b) {
    return std::conj(a.amp_h) * b.amp_h + std::conj(a.amp_v) * b.amp_v;
}

JonesVector jones_h() { return {1.0, 0.0}; }
JonesVector jones_v() { return {0.0, 1.0}; }
JonesVector jones_diag() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }
JonesVector jones_antidiag() { return {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}; }

JonesMatrix JonesMatrix::identity() { return {{1.0, 0.0, 0.0, 1.0}}; }

JonesVector JonesMatrix::apply(const JonesVector& in) const {
    return {m[0] * in.amp_h + m[1] * in.amp_v, m[2] * in.amp_h + m[3] * in.amp_v};
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix& rhs) const {
    return {{m[0] * rhs.m[0] + m[1] * rhs.m[2], m[0] * rhs.m[1] + m[1] * rhs.m[3],
             m[2] * rhs.m[0] + m[3] * rhs.m[2], m[2] * rhs.m[1] + m[3] * rhs.m[3]}};
}

bool JonesMatrix::is_unitary(double tol) const {
    // M^dag M == I
    const Complex g00 = std::conj(m[0]) * m[0] + std::conj(m[2]) * m[2];
    const Complex g01 = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
    const Complex g10 = std::conj(m[1]) * m[0] + std::conj(m[3]) * m[2];
    const Complex g11 = std::conj(m[1]) * m[1] + std::conj(m[3]) * m[3];
    return std::abs(g00 - 1.0) < tol && std::abs(g01) < tol && std::abs(g10) < tol &&
           std::abs(g11 - 1.0) < tol;
}

JonesMatrix waveplate(double retardance, double fast_axis_angle) {
    if (!std::isfinite(retardance) || !std::isfinite(fast_axis_angle))
        throw std::invalid_argument("waveplate: non-finite argument");
    const double c = std::cos(fast_axis_angle);
    const double s = std::sin(fast_axis_angle);
    const Complex e = std::exp(Complex(0.0, retardance));
    // R(theta) diag(1, e) R(-theta)
    return {{c * c + e * s * s, c * s - e * c * s, c * s - e * c * s, s * s + e * c * c}};
}

double TwoPhotonState::norm2() const {
    double n = 0.0;
    for (const auto& a : amps) n += std::norm(a);
    return n;
}

TwoPhotonState TwoPhotonState::normalized() const {
    const double n = std::sqrt(norm2());
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a null two-photon state");
    TwoPhotonState out;
    for (size_t i = 0; i < 4; ++i) out.amps[i] = amps[i] / n;
    return out;
}

TwoPhotonState product_state(const JonesVector& a, const JonesVector& b) {
    return {{a.amp_h * b.amp_h, a.amp_h * b.amp_v, a.amp_v * b.amp_h, a.amp_v * b.amp_v}};
}

Complex overlap(const TwoPhotonState& s1, const TwoPhotonState& s2) {
    Complex o = 0.0;
    for (size_t i = 0; i < 4; ++i) o += std::conj(s1.amps[i]) * s2.amps[i];
    return o;
}

bool same_ray(const TwoPhotonState& s1, const TwoPhotonState& s2, double tol) {
    return std::abs(std::norm(overlap(s1, s2)) - 1.0) < tol;
}

TwoPhotonState tensor_apply(const JonesMatrix& m_a, const JonesMatrix& m_b,
                            const TwoPhotonState& s) {
    for (const auto& c : m_a.m)
        if (!finite(c)) throw std::invalid_argument("tensor_apply: non-finite matrix entry");
    for (const auto& c : m_b.m)
        if (!finite(c)) throw std::invalid_argument("tensor_apply: non-finite matrix entry");
    TwoPhotonState out;
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            Complex acc = 0.0;
            for (int ja = 0; ja < 2; ++ja)
                for (int jb = 0; jb < 2; ++jb)
                    acc += m_a.m[static_cast<size_t>(ia) * 2 + ja] *
                           m_b.m[static_cast<size_t>(ib) * 2 + jb] *
                           s.amps[static_cast<size_t>(ja) * 2 + jb];
            out.amps[static_cast<size_t>(ia) * 2 + ib] = acc;
        }
    return out;
}

double project(const TwoPhotonState& s, const JonesVector& bra_a, const JonesVector& bra_b) {
    if (std::abs(s.norm2() - 1.0) > 1e-9)
        throw std::invalid_argument("project: state not normalized");
    if (std::abs(bra_a.norm2() - 1.0) > 1e-9 || std::abs(bra_b.norm2() - 1.0) > 1e-9)
        throw std::invalid_argument("project: projector not normalized");
    const TwoPhotonState bra = product_state(bra_a, bra_b);
    return std::norm(overlap(bra, s));
}

TwoPhotonState bell_phi(double phi) {
    if (!std::isfinite(phi)) throw std::invalid_argument("bell_phi: non-finite phase");
    const Complex e = std::exp(Complex(0.0, phi));
    const TwoPhotonState pp = product_state(jones_diag(), jones_diag());
    const TwoPhotonState mm = product_state(jones_antidiag(), jones_antidiag());
    TwoPhotonState out;
    const double inv = 1.0 / std::sqrt(2.0);
    for (size_t i = 0; i < 4; ++i) out.amps[i] = inv * (pp.amps[i] + e * mm.amps[i]);
    return out;
}

double DensityMatrix2Q::trace_real() const {
    double t = 0.0;
    for (int i = 0; i < 4; ++i) t += at(i, i).real();
    return t;
}

bool DensityMatrix2Q::is_hermitian(double tol) const {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
    return true;
}

double DensityMatrix2Q::expectation(const TwoPhotonState& s) const {
    Complex acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += std::conj(s.amps[i]) * at(i, j) * s.amps[j];
    return acc.real();
}

DensityMatrix2Q werner(double v) { return werner(v, bell_phi(0.0)); }

DensityMatrix2Q werner(double v, const TwoPhotonState& target) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("werner: visibility outside [0, 1]");
    DensityMatrix2Q rho;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Complex val = v * target.amps[i] * std::conj(target.amps[j]);
            if (i == j) val += (1.0 - v) / 4.0;
            rho.m[static_cast<size_t>(i) * 4 + j] = val;
        }
    return rho;
}

double fidelity_bound(double v_s) {
    if (!(v_s >= 0.0 && v_s <= 1.0))
        throw std::invalid_argument("fidelity_bound: visibility outside [0, 1]");
    const double r = 1.5 * std::sqrt(v_s) + 0.5 * std::sqrt(4.0 - 3.0 * v_s);
    return 0.25 * r * r;
}

double werner_overlap(double v) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("werner_overlap: visibility outside [0, 1]");
    return (1.0 + 3.0 * v) / 4.0;
}

} // namespace epsim
