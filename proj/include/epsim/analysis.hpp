#pragma once

// Statistical analysis chain: cosine fringe fitting, visibility, CHSH
// correlations and S with error propagation, and the visibility-to-fidelity
// conversion.

#include <span>
#include <vector>

#include "epsim/beamprop.hpp"  // FitError
#include "epsim/polarization.hpp"

namespace epsim {

// y = amplitude * cos(angular_frequency * x + phase) + offset, with
// amplitude folded non-negative (sign absorbed into the phase).
struct CosineFit {
    double amplitude = 0.0;
    double offset = 0.0;
    double angular_frequency = 0.0;
    double phase = 0.0;
    double amplitude_sigma = 0.0;
    double offset_sigma = 0.0;
    double frequency_sigma = 0.0;
    double phase_sigma = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

// Weighted least squares. The frequency is bracketed by a coarse grid
// search over plausible periods (each candidate solved linearly), then all
// four parameters are refined by damped Gauss-Newton until the relative
// step drops below 1e-10 (or 200 iterations -> FitError). y_errors may be
// empty for an unweighted fit; parameter sigmas then scale with the
// residual variance.
CosineFit fit_cosine(std::span<const double> x, std::span<const double> y,
                     std::span<const double> y_errors = {});

struct VisibilityResult {
    double value = 0.0;
    double sigma = 0.0;
};

// Fringe contrast amplitude/offset with first-order error propagation.
// Throws FitError when the offset is not positive.
VisibilityResult visibility(const CosineFit& fit);

struct Correlation {
    double e = 0.0;
    double sigma = 0.0;
};

// E = (n11 + n22 - n12 - n21) / total with Poisson propagation
// (sigma_i = sqrt(|n_i|) unless given explicitly).
// Throws std::domain_error when the total is not positive.
Correlation correlation_e(double n11, double n12, double n21, double n22);
Correlation correlation_e(double n11, double n12, double n21, double n22, double s11,
                          double s12, double s21, double s22);

struct ChshResult {
    double s = 0.0;
    double s_error = 0.0;
    double sigma_violation = 0.0;   // (S - 2) / dS, +inf for exact inputs
    double visibility_vs = 0.0;     // S / (2 sqrt2)
    double fidelity_lower_bound = 0.0;   // from fidelity_bound(visibility_vs)
    double fidelity_werner_overlap = 0.0;  // diagnostic (1 + 3 v)/4
    int sign_pattern = 0;           // index of the negated correlation
};

// S = max over the four single-negative sign patterns of
// |E_ab - E_ab' + E_a'b + E_a'b'| (and its permutations), with quadrature
// error. The chosen pattern index is reported.
ChshResult chsh_s(const Correlation& e_ab, const Correlation& e_abp, const Correlation& e_apb,
                  const Correlation& e_apbp);

} // namespace epsim
