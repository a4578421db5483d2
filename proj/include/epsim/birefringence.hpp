#pragma once

// Geometry and phase physics of uniaxial displacing elements: effective
// refractive index, lateral shear, longitudinal walkoff, Savart-plate
// composition and the tilt-induced phase between the two output beams.
//
// Geometry conventions:
//   z      beam axis, plates normal to z when untilted
//   (x, y) transverse plane; beam-displacer shear lies along x
//   yaw    tilt rotates the element about y, so the plane of incidence
//          is the xz plane
// The optic axis of a plate sits at cut angle beta from the plate normal,
// with its transverse projection along displacement_axis.

#include <array>
#include <complex>
#include <variant>

#include "epsim/polarization.hpp"

namespace epsim {

// Uniaxial plate cut for lateral beam displacement.
struct BirefringentPlate {
    double n_o = 1.66;           // calcite ordinary index
    double n_e = 1.49;           // calcite extraordinary index
    double cut_angle_beta = kPi / 4.0;
    double thickness_d_o_mm = 0.0;              // ordinary path length, also the plate width
    std::array<double, 2> displacement_axis{1.0, 0.0};  // unit transverse direction
    double shear_mm = 0.0;                      // lateral e-beam displacement
    // Leftover between a measured shear and the one implied by the walkoff
    // geometry; zero when the shear is geometry-derived.
    double shear_geometry_residual_mm = 0.0;

    // Shear taken from the walkoff angle of the cut.
    static BirefringentPlate from_geometry(double n_o, double n_e, double beta,
                                           double thickness_mm,
                                           std::array<double, 2> axis = {1.0, 0.0});
    // Measured shear wins over geometry; the residual is kept for reporting.
    static BirefringentPlate from_measured_shear(double n_o, double n_e, double beta,
                                                 double thickness_mm, double shear_mm,
                                                 std::array<double, 2> axis = {1.0, 0.0});

    // arctan(shear / thickness)
    double deviation_angle() const;
    // Extraordinary geometric path sqrt(d_o^2 + S^2).
    double extraordinary_path_mm() const;
};

// Two crossed displacing plates with transverse axes at +45 and -45
// degrees to x and no gap; splits/recombines a beam into two parallel
// beams sheared along x, each traversing one ordinary and one
// extraordinary segment.
struct SavartPlate {
    BirefringentPlate plate_1;  // displaces along (+1, +1)/sqrt2
    BirefringentPlate plate_2;  // displaces along (-1, +1)/sqrt2

    // Identical plates sized so the net shear along x equals shear_mm.
    // Net shear = sqrt2 times the per-plate displacement.
    static SavartPlate symmetric_from_shear(double n_o, double n_e, double beta,
                                            double shear_mm);
    static SavartPlate symmetric_from_thickness(double n_o, double n_e, double beta,
                                                double plate_thickness_mm);

    double net_shear_mm() const;
    // Per-axis displacement of each output branch, net shear / 2.
    double split_half_shear_mm() const { return net_shear_mm() / 2.0; }
    double total_thickness_mm() const {
        return plate_1.thickness_d_o_mm + plate_2.thickness_d_o_mm;
    }
};

using DisplacingElement = std::variant<BirefringentPlate, SavartPlate>;

struct TiltedElement {
    DisplacingElement element;
    double yaw_tilt_theta = 0.0;   // rad, |theta| < pi/4
    double wavelength_nm = 810.0;
};

// n = 1 / sqrt(cos^2(alpha - beta)/n_o^2 + sin^2(alpha - beta)/n_e^2),
// the phase index of the non-ordinary wave propagating at angle alpha
// when the optic axis is at beta.
double effective_index(double alpha, double beta, double n_o, double n_e);

// tan(rho) = (n_o^2 - n_e^2) tan(beta) / (n_e^2 + n_o^2 tan^2(beta))
double walkoff_angle(double n_o, double n_e, double beta);

// Longitudinal walkoff of a single displacer:
//   dz = d_o n_o - d_e n_eff(alpha, beta),  alpha = arctan(S/d_o).
double bd_walkoff(const BirefringentPlate& plate);

// Optical path difference between the two outputs of a Savart plate,
// OPL(+x branch) - OPL(-x branch). Exactly zero for identical plates.
double sp_walkoff(const SavartPlate& sp);

struct SplitBranch {
    Complex amp;        // <+|in> or <-|in>
    JonesVector pol;    // |+> or |->, normalized
    double x_mm = 0.0;
    double y_mm = 0.0;
};

// Savart splitting rule: input at (x, y) emerges as the |+> projection at
// (x + d, y + d) and the |-> projection at (x - d, y + d), where d is the
// plate's split half-shear. Probability is conserved.
std::array<SplitBranch, 2> sp_split(const SavartPlate& sp, const JonesVector& input,
                                    double x_mm, double y_mm);

// Phase difference (2 pi / lambda)(OPL_+ - OPL_-) between the two
// polarization paths of a yaw-tilted element, from exact plane-wave
// refraction with the direction-dependent extraordinary index.
// For a Savart plate the branches are the two sheared outputs; for a
// single displacer they are its e and o waves.
// Throws std::invalid_argument when |theta| >= pi/4.
double tilt_phase(const TiltedElement& te);

// Smallest-|theta| tilt for which tilt_phase reaches target_phi.
// Valid for symmetric Savart plates, where the phase is zero at zero tilt
// and increases monotonically nearby.
double tilt_for_phase(const SavartPlate& sp, double wavelength_nm, double target_phi);

namespace detail {
// Normal component (units of the vacuum wavenumber) of the internal wave
// vector in a tilted plate, for incidence angle theta in the xz plane.
double kz_ordinary(double sin_theta, double n_o);
// axis_x, axis_z are the optic-axis components in the tilt frame.
double kz_extraordinary(double sin_theta, double axis_x, double axis_z, double n_o,
                        double n_e);
} // namespace detail

} // namespace epsim
