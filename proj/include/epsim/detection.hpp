#pragma once

// Photon-counting statistics: Poissonian singles and coincidences,
// coincidence windowing, accidental estimation/subtraction and CAR.

#include <cstdint>

#include "epsim/polarization.hpp"

namespace epsim {

struct CountRecord {
    double duration_s = 0.0;
    long long singles_a = 0;
    long long singles_b = 0;
    long long coincidences = 0;     // includes accidentals
    double accidental_estimate = 0.0;
};

// One projective setting of the two measurement stations. Channels follow
// the detector labeling: 1 projects onto H, 2 onto V.
struct MeasurementSetting {
    double delta_a = 0.0;  // Alice LC retardance, rad
    double delta_b = 0.0;  // Bob LC retardance, rad
    int channel_a = 1;
    int channel_b = 1;
};

// Coincidence probability for a setting: each arm applies an LC retarder at
// 45 degrees with retardance delta, then projects onto the channel
// polarization. Visibility degrades toward the maximally mixed outcome:
//   p = v * p_ideal + (1 - v) / 4.
double setting_probability(const TwoPhotonState& state, const MeasurementSetting& setting,
                           double visibility);

struct CountRates {
    double pair_rate_hz = 0.0;
    double singles_a_hz = 0.0;
    double singles_b_hz = 0.0;
    // Multiplier on the accidental mean singles_a * singles_b * tau.
    // 1.0 is the plain product-rate model; scenario configs calibrate it.
    double accidental_scale = 1.0;
};

// Draws one counting record. True coincidences are Poissonian with mean
// pair_rate * prob * duration and contribute to both singles streams, so
// coincidences <= min(singles) holds by construction. Accidentals are
// Poissonian with mean accidental_scale * S_a * S_b * tau * duration (one
// single-sided window, no factor 2) and are included in `coincidences`;
// `accidental_estimate` carries their model mean for later subtraction.
// Deterministic per seed. Throws std::invalid_argument on negative duration.
CountRecord simulate_counts(double prob, const CountRates& rates, double duration_s,
                            double window_tau_s, std::uint64_t seed);

struct CorrectedCounts {
    double value = 0.0;  // may be negative near fringe minima; not clamped
    double sigma = 0.0;  // sqrt(cc + acc)
};

CorrectedCounts subtract_accidentals(const CountRecord& rec);

// Coincidence-to-accidental ratio; +infinity when the accidental estimate
// is zero.
double car(const CountRecord& rec);

} // namespace epsim
