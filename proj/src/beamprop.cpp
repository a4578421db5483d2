#include "epsim/beamprop.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "epsim/rng.hpp"

namespace epsim {

double GaussianBeam::rayleigh_range_mm() const {
    // w0 in um, lambda in nm: pi w0^2 / lambda is already in mm.
    return kPi * waist_radius_w0_um * waist_radius_w0_um / wavelength_nm * 1e-3;
}

double beam_radius(const GaussianBeam& beam, double z_mm) {
    if (!(beam.waist_radius_w0_um > 0.0))
        throw std::invalid_argument("beam_radius: waist must be positive");
    const double u = (z_mm - beam.waist_position_z0_mm) / beam.rayleigh_range_mm();
    return beam.waist_radius_w0_um * std::sqrt(1.0 + u * u);
}

double lens_focused_waist_um(double wavelength_nm, double input_radius_mm,
                             double focal_length_mm) {
    // lambda f / (pi w_in), converted to micrometers.
    return wavelength_nm * 1e-6 * focal_length_mm / (kPi * input_radius_mm) * 1e3;
}

WaistFit fit_waist(const WaistScan& scan, double wavelength_nm) {
    const size_t n = scan.z_mm.size();
    if (n != scan.w_um.size() || n < 5)
        throw std::invalid_argument("fit_waist: need at least 5 matched samples");
    for (double w : scan.w_um)
        if (!(w > 0.0)) throw std::invalid_argument("fit_waist: radii must be positive");

    // Start at the smallest measured radius.
    size_t imin = 0;
    for (size_t i = 1; i < n; ++i)
        if (scan.w_um[i] < scan.w_um[imin]) imin = i;
    double w0 = std::max(scan.w_um[imin], 1e-3);
    double z0 = scan.z_mm[imin];

    auto sse = [&](double w0c, double z0c) {
        GaussianBeam b{wavelength_nm, w0c, z0c};
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double r = scan.w_um[i] - beam_radius(b, scan.z_mm[i]);
            acc += r * r;
        }
        return acc;
    };

    double lambda_damp = 1e-3;
    double current = sse(w0, z0);
    int iter = 0;
    bool converged = false;
    for (; iter < 200; ++iter) {
        // Normal equations for the 2-parameter Jacobian.
        const double zr = kPi * w0 * w0 / wavelength_nm * 1e-3;
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double u = (scan.z_mm[i] - z0) / zr;
            const double root = std::sqrt(1.0 + u * u);
            const double dw_dw0 = (1.0 - u * u) / root;
            const double dw_dz0 = -w0 * u / (zr * root);
            const double r = scan.w_um[i] - w0 * root;
            jtj00 += dw_dw0 * dw_dw0;
            jtj01 += dw_dw0 * dw_dz0;
            jtj11 += dw_dz0 * dw_dz0;
            jtr0 += dw_dw0 * r;
            jtr1 += dw_dz0 * r;
        }
        bool stepped = false;
        for (int attempt = 0; attempt < 16; ++attempt) {
            const double a00 = jtj00 * (1.0 + lambda_damp);
            const double a11 = jtj11 * (1.0 + lambda_damp);
            const double det = a00 * a11 - jtj01 * jtj01;
            if (det == 0.0) break;
            const double dw0 = (a11 * jtr0 - jtj01 * jtr1) / det;
            const double dz0 = (a00 * jtr1 - jtj01 * jtr0) / det;
            const double w0n = w0 + dw0;
            const double z0n = z0 + dz0;
            if (w0n > 0.0) {
                const double next = sse(w0n, z0n);
                if (next <= current) {
                    const double rel = std::max(std::abs(dw0) / std::max(w0, 1e-12),
                                                std::abs(dz0) / std::max(std::abs(z0), 1.0));
                    w0 = w0n;
                    z0 = z0n;
                    current = next;
                    lambda_damp = std::max(lambda_damp * 0.3, 1e-12);
                    stepped = true;
                    if (rel < 1e-10) converged = true;
                    break;
                }
            }
            lambda_damp *= 10.0;
        }
        if (converged) break;
        if (!stepped) {
            // No productive step at any damping: either we are at the
            // minimum (tiny gradient) or genuinely stuck.
            const double grad = std::hypot(jtr0, jtr1);
            if (grad < 1e-9 * std::max(current, 1.0)) {
                converged = true;
                break;
            }
            throw FitError("fit_waist: no convergence after damping exhausted",
                           std::sqrt(current));
        }
    }
    if (!converged)
        throw FitError("fit_waist: no convergence within 200 iterations", std::sqrt(current));

    // Covariance from the final Jacobian, scaled by the residual variance.
    const double zr = kPi * w0 * w0 / wavelength_nm * 1e-3;
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0;
    bool any_left = false, any_right = false;
    for (size_t i = 0; i < n; ++i) {
        const double u = (scan.z_mm[i] - z0) / zr;
        const double root = std::sqrt(1.0 + u * u);
        const double dw_dw0 = (1.0 - u * u) / root;
        const double dw_dz0 = -w0 * u / (zr * root);
        jtj00 += dw_dw0 * dw_dw0;
        jtj01 += dw_dw0 * dw_dz0;
        jtj11 += dw_dz0 * dw_dz0;
        (scan.z_mm[i] < z0 ? any_left : any_right) = true;
    }
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    const double dof = static_cast<double>(n - 2);
    const double s2 = current / dof;
    WaistFit fit;
    fit.beam = {wavelength_nm, w0, z0};
    if (det > 0.0) {
        fit.w0_sigma_um = std::sqrt(std::max(jtj11 / det * s2, 0.0));
        fit.z0_sigma_mm = std::sqrt(std::max(jtj00 / det * s2, 0.0));
    }
    fit.residual_norm = std::sqrt(current);
    fit.iterations = iter;
    fit.one_sided = !(any_left && any_right);
    return fit;
}

std::pair<WaistScan, WaistScan> walkoff_experiment(const DisplacingElement& element,
                                                   const WalkoffSetup& setup,
                                                   double noise_sigma_um, std::uint64_t seed) {
    const double element_length =
        std::holds_alternative<BirefringentPlate>(element)
            ? std::get<BirefringentPlate>(element).thickness_d_o_mm
            : std::get<SavartPlate>(element).total_thickness_mm();
    // Midpoint placement: the element must fit inside the middle half of the
    // lens-to-focus gap.
    if (!(element_length < setup.focal_length_mm / 2.0))
        throw std::invalid_argument("walkoff_experiment: element does not fit between lens and waist");
    if (setup.scan_points < 5)
        throw std::invalid_argument("walkoff_experiment: need at least 5 scan points");

    const double dz = std::holds_alternative<BirefringentPlate>(element)
                          ? bd_walkoff(std::get<BirefringentPlate>(element))
                          : sp_walkoff(std::get<SavartPlate>(element));

    // Ordinary branch focuses at the nominal focal distance, the displaced
    // branch at +dz.
    const GaussianBeam ordinary{setup.wavelength_nm, setup.waist_radius_um,
                                setup.focal_length_mm};
    const GaussianBeam displaced{setup.wavelength_nm, setup.waist_radius_um,
                                 setup.focal_length_mm + dz};

    const double zr = ordinary.rayleigh_range_mm();
    const double center = setup.focal_length_mm + dz / 2.0;
    const double half = setup.scan_halfwidth_rayleigh * zr;

    auto make_scan = [&](const GaussianBeam& beam, std::uint64_t branch_seed) {
        std::mt19937_64 rng(branch_seed);
        std::normal_distribution<double> noise(0.0, 1.0);
        WaistScan scan;
        scan.radius_noise_sigma_um = noise_sigma_um;
        scan.z_mm.reserve(static_cast<size_t>(setup.scan_points));
        scan.w_um.reserve(static_cast<size_t>(setup.scan_points));
        for (int i = 0; i < setup.scan_points; ++i) {
            const double z = center - half +
                             2.0 * half * static_cast<double>(i) /
                                 static_cast<double>(setup.scan_points - 1);
            double w = beam_radius(beam, z);
            if (noise_sigma_um > 0.0) w += noise_sigma_um * noise(rng);
            scan.z_mm.push_back(z);
            scan.w_um.push_back(std::max(w, 0.05));
        }
        return scan;
    };

    return {make_scan(ordinary, derive_seed(seed, 0)),
            make_scan(displaced, derive_seed(seed, 1))};
}

} // namespace epsim
