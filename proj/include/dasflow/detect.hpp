#pragma once

#include "dasflow/waterfall.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dasflow {

struct ButterworthConfig {
    int order = 1;
    double cutoff = 0.5;  // W_n, fraction of Nyquist
    bool zero_phase = true;
};

void validate(const ButterworthConfig& cfg);

// One biquad: b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct Section {
    double b0, b1, b2;
    double a1, a2;
};

// Bilinear-transform Butterworth low-pass as second-order sections, each
// with unity DC gain.
std::vector<Section> butterworth_design(int order, double cutoff);

// H(e^{j pi f}) for normalized frequency f in [0, 1].
std::complex<double> frequency_response(std::span<const Section> sos, double f);

// Direct-form II transposed cascade, zero initial state.
std::vector<double> sos_filter(std::span<const Section> sos, std::span<const double> x);

// Throws std::invalid_argument if the signal is shorter than 8 samples or
// the config is out of range.
std::vector<double> butterworth_lowpass(std::span<const double> signal, const ButterworthConfig& cfg);

struct Peak {
    std::size_t index = 0;
    double height = 0.0;
    std::size_t width = 0;  // contiguous samples above height / 2

    friend bool operator==(const Peak&, const Peak&) = default;
};

struct Extrema {
    std::vector<std::size_t> crests;
    std::vector<std::size_t> troughs;
};

// Sign-of-difference extremum search. Plateaus resolve to their first
// sample; end samples are never extrema.
Extrema find_extrema(std::span<const double> v);

// Crests with height >= min_height.
std::vector<Peak> find_peaks(std::span<const double> v, double min_height);

// Samples strictly above v[index] / 2 contiguous with index.
std::size_t half_height_width(std::span<const double> v, std::size_t index);

struct EntryEvent {
    std::size_t vehicle_id = 0;  // 1-based, ordered by entry_row
    std::size_t entry_row = 0;
    std::size_t entry_col = 0;
    Peak peak;
};

struct DetectConfig {
    ButterworthConfig butterworth;
    double min_height = 0.06;
    std::size_t entry_col = 0;
    bool filter = true;  // false skips the low-pass stage
    // Peaks closer than this [s] to a higher peak are dropped; 0 keeps every
    // crest. The rectified gauge response leaves a weaker lobe one gauge
    // length behind each vehicle.
    double min_separation = 2.0;
};

// Greedy by height (ties to the earlier index): keeps a peak only if no kept
// peak lies fewer than `distance` samples away. Output sorted by index.
std::vector<Peak> separate_peaks(std::span<const Peak> peaks, double distance);

std::vector<EntryEvent> detect_entries(const WaterfallMatrix& m, const DetectConfig& cfg);

} // namespace dasflow
