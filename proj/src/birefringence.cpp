#include "epsim/birefringence.hpp"

#include <cmath>
#include <stdexcept>

namespace epsim {

namespace {

void check_indices(double n_o, double n_e) {
    if (!(n_o > 1.0) || !(n_e > 1.0))
        throw std::invalid_argument("refractive indices must exceed 1");
}

} // namespace

double effective_index(double alpha, double beta, double n_o, double n_e) {
    check_indices(n_o, n_e);
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("effective_index: non-finite angle");
    const double c = std::cos(alpha - beta);
    const double s = std::sin(alpha - beta);
    return 1.0 / std::sqrt(c * c / (n_o * n_o) + s * s / (n_e * n_e));
}

double walkoff_angle(double n_o, double n_e, double beta) {
    check_indices(n_o, n_e);
    const double t = std::tan(beta);
    return std::atan((n_o * n_o - n_e * n_e) * t / (n_e * n_e + n_o * n_o * t * t));
}

BirefringentPlate BirefringentPlate::from_geometry(double n_o, double n_e, double beta,
                                                   double thickness_mm,
                                                   std::array<double, 2> axis) {
    check_indices(n_o, n_e);
    if (!(thickness_mm > 0.0))
        throw std::invalid_argument("plate thickness must be positive");
    BirefringentPlate p;
    p.n_o = n_o;
    p.n_e = n_e;
    p.cut_angle_beta = beta;
    p.thickness_d_o_mm = thickness_mm;
    p.displacement_axis = axis;
    p.shear_mm = thickness_mm * std::tan(walkoff_angle(n_o, n_e, beta));
    p.shear_geometry_residual_mm = 0.0;
    return p;
}

BirefringentPlate BirefringentPlate::from_measured_shear(double n_o, double n_e, double beta,
                                                         double thickness_mm, double shear_mm,
                                                         std::array<double, 2> axis) {
    BirefringentPlate p = from_geometry(n_o, n_e, beta, thickness_mm, axis);
    p.shear_geometry_residual_mm = shear_mm - p.shear_mm;
    p.shear_mm = shear_mm;
    return p;
}

double BirefringentPlate::deviation_angle() const {
    return std::atan(shear_mm / thickness_d_o_mm);
}

double BirefringentPlate::extraordinary_path_mm() const {
    return std::hypot(thickness_d_o_mm, shear_mm);
}

double bd_walkoff(const BirefringentPlate& plate) {
    const double alpha = plate.deviation_angle();
    const double n_eff = effective_index(alpha, plate.cut_angle_beta, plate.n_o, plate.n_e);
    return plate.thickness_d_o_mm * plate.n_o - plate.extraordinary_path_mm() * n_eff;
}

SavartPlate SavartPlate::symmetric_from_shear(double n_o, double n_e, double beta,
                                              double shear_mm) {
    const double per_plate = shear_mm / std::sqrt(2.0);
    const double thickness = per_plate / std::tan(walkoff_angle(n_o, n_e, beta));
    return symmetric_from_thickness(n_o, n_e, beta, thickness);
}

SavartPlate SavartPlate::symmetric_from_thickness(double n_o, double n_e, double beta,
                                                  double plate_thickness_mm) {
    const double inv = 1.0 / std::sqrt(2.0);
    SavartPlate sp;
    sp.plate_1 = BirefringentPlate::from_geometry(n_o, n_e, beta, plate_thickness_mm,
                                                  {inv, inv});
    sp.plate_2 = BirefringentPlate::from_geometry(n_o, n_e, beta, plate_thickness_mm,
                                                  {-inv, inv});
    return sp;
}

double SavartPlate::net_shear_mm() const {
    // Branch + is displaced by plate 1, branch - by plate 2; the x separation
    // is the sum of the axis-projected displacements.
    return (plate_1.shear_mm * plate_1.displacement_axis[0] -
            plate_2.shear_mm * plate_2.displacement_axis[0]);
}

double sp_walkoff(const SavartPlate& sp) {
    // Branch +: extraordinary in plate 1, ordinary in plate 2.
    // Branch -: ordinary in plate 1, extraordinary in plate 2.
    const double n_eff_1 = effective_index(sp.plate_1.deviation_angle(),
                                           sp.plate_1.cut_angle_beta, sp.plate_1.n_o,
                                           sp.plate_1.n_e);
    const double n_eff_2 = effective_index(sp.plate_2.deviation_angle(),
                                           sp.plate_2.cut_angle_beta, sp.plate_2.n_o,
                                           sp.plate_2.n_e);
    const double opl_plus = sp.plate_1.extraordinary_path_mm() * n_eff_1 +
                            sp.plate_2.thickness_d_o_mm * sp.plate_2.n_o;
    const double opl_minus = sp.plate_1.thickness_d_o_mm * sp.plate_1.n_o +
                             sp.plate_2.extraordinary_path_mm() * n_eff_2;
    return opl_plus - opl_minus;
}

std::array<SplitBranch, 2> sp_split(const SavartPlate& sp, const JonesVector& input,
                                    double x_mm, double y_mm) {
    if (std::abs(input.norm2() - 1.0) > 1e-9)
        throw std::invalid_argument("sp_split: input not normalized");
    const double d = sp.split_half_shear_mm();
    const JonesVector plus = jones_diag();
    const JonesVector minus = jones_antidiag();
    return {SplitBranch{inner(plus, input), plus, x_mm + d, y_mm + d},
            SplitBranch{inner(minus, input), minus, x_mm - d, y_mm + d}};
}

namespace detail {

double kz_ordinary(double sin_theta, double n_o) {
    return std::sqrt(n_o * n_o - sin_theta * sin_theta);
}

double kz_extraordinary(double sin_theta, double axis_x, double axis_z, double n_o,
                        double n_e) {
    // Wave vector k0 (sin_theta, 0, z) with transverse component fixed by
    // refraction. The extraordinary dispersion relation
    //   (k.a)^2 / n_e^2 + (|k|^2 - (k.a)^2) / n_o^2 = k0^2
    // is quadratic in z; take the forward root.
    const double A = 1.0 / (n_o * n_o) - 1.0 / (n_e * n_e);
    const double B = 1.0 / (n_e * n_e);
    const double u = sin_theta * axis_x;
    const double qa = A * axis_z * axis_z + B;
    const double qb = 2.0 * A * u * axis_z;
    const double qc = A * u * u + B * sin_theta * sin_theta - 1.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    return (-qb + std::sqrt(disc)) / (2.0 * qa);
}

} // namespace detail

namespace {

// Per-plate phase (in units of k0 * thickness) for the e and o waves.
struct PlatePhases {
    double e;
    double o;
};

PlatePhases plate_phases(const BirefringentPlate& p, double sin_theta) {
    const double s_beta = std::sin(p.cut_angle_beta);
    const double axis_x = s_beta * p.displacement_axis[0];
    const double axis_z = std::cos(p.cut_angle_beta);
    return {p.thickness_d_o_mm * detail::kz_extraordinary(sin_theta, axis_x, axis_z, p.n_o, p.n_e),
            p.thickness_d_o_mm * detail::kz_ordinary(sin_theta, p.n_o)};
}

} // namespace

double tilt_phase(const TiltedElement& te) {
    if (!(std::abs(te.yaw_tilt_theta) < kPi / 4.0))
        throw std::invalid_argument("tilt_phase: |theta| must stay below pi/4");
    const double sin_theta = std::sin(te.yaw_tilt_theta);
    const double k0 = 2.0 * kPi / (te.wavelength_nm * 1e-6);  // rad per mm

    if (std::holds_alternative<BirefringentPlate>(te.element)) {
        const auto& plate = std::get<BirefringentPlate>(te.element);
        const PlatePhases ph = plate_phases(plate, sin_theta);
        return k0 * (ph.e - ph.o);
    }
    const auto& sp = std::get<SavartPlate>(te.element);
    const PlatePhases ph1 = plate_phases(sp.plate_1, sin_theta);
    const PlatePhases ph2 = plate_phases(sp.plate_2, sin_theta);
    return k0 * ((ph1.e + ph2.o) - (ph1.o + ph2.e));
}

double tilt_for_phase(const SavartPlate& sp, double wavelength_nm, double target_phi) {
    if (target_phi == 0.0) return 0.0;
    auto phi_at = [&](double theta) {
        return tilt_phase({sp, theta, wavelength_nm});
    };
    // Walk outward until the target is bracketed, then bisect.
    const double sign = phi_at(1e-6) * target_phi >= 0.0 ? 1.0 : -1.0;
    double hi = 1e-6;
    while (std::abs(phi_at(sign * hi)) < std::abs(target_phi)) {
        hi *= 2.0;
        if (hi >= kPi / 4.0)
            throw std::invalid_argument("tilt_for_phase: target outside the tilt validity range");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::abs(phi_at(sign * mid)) < std::abs(target_phi))
            lo = mid;
        else
            hi = mid;
    }
    return sign * 0.5 * (lo + hi);
}

} // namespace epsim
