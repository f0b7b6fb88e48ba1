#pragma once

// Orthogonal 1-D discrete wavelet transform with half-sample symmetric
// boundary extension. Coefficient layout and lengths follow the common
// convention: each level yields floor((N + L - 1) / 2) coefficients per band.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dasflow::wavelet {

struct Wavelet {
    std::string name;
    std::vector<double> dec_lo;
    std::vector<double> dec_hi;

    std::size_t taps() const noexcept { return dec_lo.size(); }
};

// "haar"/"db1", "db2", "db3", "db4", "sym4". Throws std::invalid_argument otherwise.
const Wavelet& by_name(std::string_view name);

// Deepest level at which every band still spans the filter support.
int max_level(std::size_t signal_length, const Wavelet& w);

struct Decomposition {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;  // details[0] is the finest level
    std::vector<std::size_t> input_lengths;    // input length at each level
};

Decomposition wavedec(std::span<const double> signal, const Wavelet& w, int levels);
std::vector<double> waverec(const Decomposition& d, const Wavelet& w);

} // namespace dasflow::wavelet
