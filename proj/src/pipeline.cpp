#include "epsim/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace epsim {

double LossBudget::arm_transmission() const {
    return component_transmission * (1.0 - shwp_interface_loss) * (1.0 - knife_edge_loss) *
           fiber_coupling * detector_efficiency;
}

void SourceConfig::validate() const {
    if (!(pump_power_mw >= 0.0)) throw std::invalid_argument("pump power must be non-negative");
    if (!(pair_generation_rate_per_mw >= 0.0))
        throw std::invalid_argument("pair generation rate must be non-negative");
    if (!(intrinsic_visibility >= 0.0 && intrinsic_visibility <= 1.0))
        throw std::invalid_argument("intrinsic visibility outside [0, 1]");
    for (double f : {loss.component_transmission, loss.shwp_interface_loss,
                     loss.knife_edge_loss, loss.fiber_coupling, loss.detector_efficiency})
        if (!(f >= 0.0 && f <= 1.0))
            throw std::invalid_argument("loss budget fractions must lie in [0, 1]");
    if (!(spectral.spdc_fwhm_nm > 0.0) || !(spectral.filter_fwhm_nm > 0.0))
        throw std::invalid_argument("spectral bandwidths must be positive");
    if (!(std::abs(tilt_theta_rad) < kPi / 4.0))
        throw std::invalid_argument("tilt angle outside the model validity range");
}

PipelineTrace evolve_state_trace(const SourceConfig& cfg) {
    cfg.validate();
    PipelineTrace tr;
    tr.pump = {Complex(1.0, 0.0), jones_v(), 0.0, 0.0};

    // First Savart plate: |+> branch displaced to +x, |-> branch to -x.
    const auto split = sp_split(cfg.sp1, tr.pump.pol, tr.pump.x_mm, tr.pump.y_mm);
    tr.after_sp1 = {PathBranch{split[0].amp, split[0].pol, split[0].x_mm, split[0].y_mm},
                    PathBranch{split[1].amp, split[1].pol, split[1].x_mm, split[1].y_mm}};

    // Segmented half-wave plate 1: the +x segment at -22.5 deg maps |+> to
    // V, the -x segment at +22.5 deg maps |-> to V (each up to sign, which
    // stays in the branch polarization).
    const JonesMatrix hwp_m = half_wave_plate(-kPi / 8.0);
    const JonesMatrix hwp_p = half_wave_plate(kPi / 8.0);
    tr.after_shwp1 = tr.after_sp1;
    tr.after_shwp1[0].pol = hwp_m.apply(tr.after_sp1[0].pol);
    tr.after_shwp1[1].pol = hwp_p.apply(tr.after_sp1[1].pol);

    // Type-0 down-conversion: only the V component pumps the crystal, and
    // the pump phase transfers linearly to the pair amplitude.
    tr.after_spdc = tr.after_shwp1;
    for (auto& branch : tr.after_spdc) {
        const Complex v_amp = inner(jones_v(), branch.pol);
        if (std::abs(std::norm(v_amp) - 1.0) > 1e-9)
            throw std::invalid_argument("evolve_state: pump reaching the crystal is not V-polarized");
        branch.amp *= v_amp;
        branch.pol = jones_v();
    }

    // Segmented half-wave plate 2: +x pair rotated to |--|>, -x pair to |++>.
    // Both photons of a branch traverse the same segment, so the branch
    // polarization transforms once and enters the pair state squared.
    tr.after_shwp2 = tr.after_spdc;
    tr.after_shwp2[0].pol = hwp_p.apply(tr.after_spdc[0].pol);
    tr.after_shwp2[1].pol = hwp_m.apply(tr.after_spdc[1].pol);

    // Second Savart plate recombines the branches; the yaw tilt sets the
    // relative phase. Phase referenced to the + branch so the output reads
    // (|++> + e^{i phi} |-->)/sqrt2.
    tr.phi = tilt_phase({cfg.sp2, cfg.tilt_theta_rad, cfg.sp2_wavelength_nm});
    TwoPhotonState out{};
    for (size_t b = 0; b < 2; ++b) {
        const PathBranch& branch = tr.after_shwp2[b];
        const Complex branch_phase =
            b == 0 ? Complex(1.0, 0.0) : std::exp(Complex(0.0, tr.phi));
        const TwoPhotonState pair = product_state(branch.pol, branch.pol);
        for (size_t i = 0; i < 4; ++i) out.amps[i] += branch.amp * branch_phase * pair.amps[i];
    }
    tr.output = out.normalized();
    return tr;
}

TwoPhotonState evolve_state(const SourceConfig& cfg) { return evolve_state_trace(cfg).output; }

std::vector<std::pair<double, double>> interference_scan(const SourceConfig& cfg,
                                                         std::span<const double> theta_grid) {
    cfg.validate();
    if (theta_grid.empty()) throw std::invalid_argument("interference_scan: empty grid");
    std::vector<std::pair<double, double>> out;
    out.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        const double phi = tilt_phase({cfg.sp2, theta, cfg.sp2_wavelength_nm});
        out.emplace_back(theta, 0.5 * (1.0 + cfg.intrinsic_visibility * std::cos(phi)));
    }
    return out;
}

RateReport rate_report(const SourceConfig& cfg) {
    cfg.validate();
    RateReport rep;
    rep.spectral_factor = spectral_filter_factor(cfg.spectral.spdc_fwhm_nm,
                                                 cfg.spectral.filter_fwhm_nm);
    rep.generated_hz = cfg.pair_generation_rate_per_mw * cfg.pump_power_mw;
    rep.in_band_hz = rep.generated_hz * rep.spectral_factor;
    const double t_arm = cfg.loss.arm_transmission();
    rep.singles_a_hz = rep.in_band_hz * t_arm;
    rep.singles_b_hz = rep.in_band_hz * t_arm;
    rep.coincidences_hz = rep.in_band_hz * t_arm * t_arm;
    const double summed = rep.singles_a_hz + rep.singles_b_hz;
    rep.heralding_eta = summed > 0.0 ? rep.coincidences_hz / summed : 0.0;
    rep.heralding_eta_per_arm =
        rep.singles_a_hz > 0.0 ? rep.coincidences_hz / rep.singles_a_hz : 0.0;
    rep.detected_brightness =
        cfg.pump_power_mw > 0.0 ? rep.coincidences_hz / cfg.pump_power_mw : 0.0;
    rep.emitted_brightness = rep.heralding_eta > 0.0
                                 ? rep.detected_brightness / (rep.heralding_eta * rep.heralding_eta)
                                 : 0.0;
    return rep;
}

KnifeEdgeRoute knife_edge_route(int momentum_sign) {
    if (momentum_sign > 0) return KnifeEdgeRoute::to_alice;
    if (momentum_sign < 0) return KnifeEdgeRoute::to_bob;
    return KnifeEdgeRoute::lost;
}

double knife_edge_pair_survival(double edge_loss) {
    if (!(edge_loss >= 0.0 && edge_loss <= 1.0))
        throw std::invalid_argument("knife_edge_pair_survival: loss outside [0, 1]");
    return (1.0 - edge_loss) * (1.0 - edge_loss);
}

double spectral_filter_factor(double spdc_fwhm_nm, double filter_fwhm_nm) {
    if (!(spdc_fwhm_nm > 0.0) || !(filter_fwhm_nm > 0.0))
        throw std::invalid_argument("spectral_filter_factor: bandwidths must be positive");
    // Gaussian spectrum with the given FWHM inside a hard band of full
    // width filter_fwhm centered on the line.
    const double sigma = spdc_fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return std::erf(filter_fwhm_nm / 2.0 / (sigma * std::sqrt(2.0)));
}

} // namespace epsim
