#pragma once

// Source model: a vertically polarized pump is split by a first Savart
// plate, both paths are rotated back to V, down-converted in the crystal,
// counter-rotated to the diagonal basis and recombined by a second,
// tiltable Savart plate. The output is the phase-parameterized Bell family
// together with the rate/loss budget of the realized source.

#include <array>
#include <string>
#include <vector>

#include "epsim/birefringence.hpp"
#include "epsim/polarization.hpp"

namespace epsim {

struct LossBudget {
    double component_transmission = 0.78;
    double shwp_interface_loss = 0.10;
    double knife_edge_loss = 0.15;
    double fiber_coupling = 0.662;
    double detector_efficiency = 0.60;

    // Per-photon survival through one arm, all factors multiplied.
    double arm_transmission() const;
};

struct SpectralBand {
    double spdc_fwhm_nm = 22.0;
    double filter_fwhm_nm = 10.0;
};

struct SourceConfig {
    double pump_power_mw = 2.6;
    // Full-bandwidth pair rate at the crystal, before spectral filtering
    // and collection losses.
    double pair_generation_rate_per_mw = 4.1499e6;
    double tilt_theta_rad = 0.0;      // yaw tilt of the recombining plate
    double intrinsic_visibility = 0.99;
    LossBudget loss{};
    SpectralBand spectral{};
    SavartPlate sp1 = SavartPlate::symmetric_from_shear(1.66, 1.49, kPi / 4.0, 1.0);
    SavartPlate sp2 = SavartPlate::symmetric_from_shear(1.66, 1.49, kPi / 4.0, 1.0);
    double sp2_wavelength_nm = 810.0;

    void validate() const;  // throws std::invalid_argument on bad values
};

// One path branch through the source; amp carries weight and phase, pol is
// the (single-photon) polarization shared by both photons after
// down-conversion.
struct PathBranch {
    Complex amp{0.0, 0.0};
    JonesVector pol{};
    double x_mm = 0.0;
    double y_mm = 0.0;
};

// Labeled intermediate states for every element of the chain.
struct PipelineTrace {
    PathBranch pump;                          // single photon, |V> at origin
    std::array<PathBranch, 2> after_sp1;      // {right (+), left (-)}
    std::array<PathBranch, 2> after_shwp1;    // both rotated to V
    std::array<PathBranch, 2> after_spdc;     // pair branches, pol applies to each photon
    std::array<PathBranch, 2> after_shwp2;    // diagonal-basis pair branches
    double phi = 0.0;                         // recombination phase
    TwoPhotonState output{};
};

PipelineTrace evolve_state_trace(const SourceConfig& cfg);

// The recombined two-photon state, equal to bell_phi(tilt_phase) of the
// tilted second plate up to a global phase.
TwoPhotonState evolve_state(const SourceConfig& cfg);

// Coincidence probability after projecting both photons onto H and
// splitting on a balanced fiber coupler: P = (1 + V cos(phi(theta))) / 2.
std::vector<std::pair<double, double>> interference_scan(const SourceConfig& cfg,
                                                         std::span<const double> theta_grid);

struct RateReport {
    double generated_hz = 0.0;        // full SPDC bandwidth, at the crystal
    double in_band_hz = 0.0;          // after the spectral filter factor
    double singles_a_hz = 0.0;
    double singles_b_hz = 0.0;
    double coincidences_hz = 0.0;
    double heralding_eta = 0.0;          // CC / (S_a + S_b), the reported convention
    double heralding_eta_per_arm = 0.0;  // CC / S_arm, documented alternative
    double detected_brightness = 0.0;    // pairs / (s mW)
    double emitted_brightness = 0.0;     // detected / eta^2 estimator
    double spectral_factor = 0.0;
};

// Multiplicative loss budget per arm; detected rates scale linearly with
// pump power. Zero pump yields an all-zero report.
RateReport rate_report(const SourceConfig& cfg);

enum class KnifeEdgeRoute { to_alice, to_bob, lost };

// Deterministic momentum routing at the knife edge: the +x half of the
// emission ring reflects to Alice, the -x half passes to Bob, and photons
// on the edge are lost.
KnifeEdgeRoute knife_edge_route(int momentum_sign);

// Probability that both photons of a pair survive the edge region when
// each is lost independently with probability edge_loss.
double knife_edge_pair_survival(double edge_loss);

// Fraction of a Gaussian spectrum (given FWHM) transmitted by an ideal
// band-pass filter of the given full width.
double spectral_filter_factor(double spdc_fwhm_nm, double filter_fwhm_nm);

} // namespace epsim
