#include "epsim/detection.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "epsim/rng.hpp"

namespace epsim {

double setting_probability(const TwoPhotonState& state, const MeasurementSetting& setting,
                           double visibility) {
    if (setting.channel_a < 1 || setting.channel_a > 2 || setting.channel_b < 1 ||
        setting.channel_b > 2)
        throw std::invalid_argument("setting_probability: channels must be 1 or 2");
    if (!(visibility >= 0.0 && visibility <= 1.0))
        throw std::invalid_argument("setting_probability: visibility outside [0, 1]");
    const TwoPhotonState rotated =
        tensor_apply(lc_retarder(setting.delta_a), lc_retarder(setting.delta_b), state);
    const JonesVector bra_a = setting.channel_a == 1 ? jones_h() : jones_v();
    const JonesVector bra_b = setting.channel_b == 1 ? jones_h() : jones_v();
    const double p_ideal = project(rotated, bra_a, bra_b);
    // Projection of the maximally mixed state onto any product state is 1/4.
    const double p_mixed = 0.25;
    return visibility * p_ideal + (1.0 - visibility) * p_mixed;
}

CountRecord simulate_counts(double prob, const CountRates& rates, double duration_s,
                            double window_tau_s, std::uint64_t seed) {
    if (duration_s < 0.0) throw std::invalid_argument("simulate_counts: negative duration");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::invalid_argument("simulate_counts: probability outside [0, 1]");
    if (rates.pair_rate_hz < 0.0 || rates.singles_a_hz < 0.0 || rates.singles_b_hz < 0.0)
        throw std::invalid_argument("simulate_counts: negative rate");

    CountRecord rec;
    rec.duration_s = duration_s;
    if (duration_s == 0.0) return rec;

    const double mean_cc = rates.pair_rate_hz * prob * duration_s;
    const double mean_acc = rates.accidental_scale * rates.singles_a_hz * rates.singles_b_hz *
                            window_tau_s * duration_s;

    std::mt19937_64 rng(seed);
    auto poisson = [&rng](double mean) -> long long {
        if (mean <= 0.0) return 0;
        std::poisson_distribution<long long> dist(mean);
        return dist(rng);
    };

    const long long cc_true = poisson(mean_cc);
    const long long acc = poisson(mean_acc);
    rec.coincidences = cc_true + acc;
    rec.accidental_estimate = mean_acc;

    // Pair photons and accidental photons appear in both singles streams;
    // the remainder of each stream is independent background.
    const double extra_a = rates.singles_a_hz * duration_s - mean_cc - mean_acc;
    const double extra_b = rates.singles_b_hz * duration_s - mean_cc - mean_acc;
    rec.singles_a = rec.coincidences + poisson(std::max(extra_a, 0.0));
    rec.singles_b = rec.coincidences + poisson(std::max(extra_b, 0.0));
    return rec;
}

CorrectedCounts subtract_accidentals(const CountRecord& rec) {
    CorrectedCounts out;
    out.value = static_cast<double>(rec.coincidences) - rec.accidental_estimate;
    out.sigma = std::sqrt(static_cast<double>(rec.coincidences) + rec.accidental_estimate);
    return out;
}

double car(const CountRecord& rec) {
    if (rec.accidental_estimate <= 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(rec.coincidences) / rec.accidental_estimate;
}

} // namespace epsim
