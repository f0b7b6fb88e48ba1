#include "dasflow/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dasflow {

void validate(const ButterworthConfig& cfg) {
    if (cfg.order < 1) throw std::invalid_argument("butterworth: order must be >= 1");
    if (!(cfg.cutoff > 0.0 && cfg.cutoff < 1.0))
        throw std::invalid_argument("butterworth: cutoff Wn must lie in (0, 1)");
}

std::vector<Section> butterworth_design(int order, double cutoff) {
    validate(ButterworthConfig{order, cutoff, false});
    using cd = std::complex<double>;
    const double warped = 2.0 * std::tan(std::numbers::pi * cutoff / 2.0);
    std::vector<Section> sos;
    const int n = order;
    for (int k = 0; k < n / 2; ++k) {
        const double angle = std::numbers::pi * (2.0 * k + n + 1.0) / (2.0 * n);
        const cd s = warped * std::polar(1.0, angle);
        const cd z = (2.0 + s) / (2.0 - s);
        const double a1 = -2.0 * z.real();
        const double a2 = std::norm(z);
        const double g = (1.0 + a1 + a2) / 4.0;
        sos.push_back({g, 2.0 * g, g, a1, a2});
    }
    if (n % 2 == 1) {
        const double s = -warped;
        const double z = (2.0 + s) / (2.0 - s);
        const double a1 = -z;
        const double g = (1.0 + a1) / 2.0;
        sos.push_back({g, g, 0.0, a1, 0.0});
    }
    return sos;
}

std::complex<double> frequency_response(std::span<const Section> sos, double f) {
    const std::complex<double> zi = std::polar(1.0, -std::numbers::pi * f);  // z^-1
    std::complex<double> h = 1.0;
    for (const auto& s : sos)
        h *= (s.b0 + zi * (s.b1 + zi * s.b2)) / (1.0 + zi * (s.a1 + zi * s.a2));
    return h;
}

namespace {

struct State {
    double z1 = 0.0, z2 = 0.0;
};

void run(std::span<const Section> sos, std::vector<State>& state, std::vector<double>& x) {
    for (std::size_t k = 0; k < sos.size(); ++k) {
        const auto& s = sos[k];
        auto& st = state[k];
        for (double& v : x) {
            const double y = s.b0 * v + st.z1;
            st.z1 = s.b1 * v - s.a1 * y + st.z2;
            st.z2 = s.b2 * v - s.a2 * y;
            v = y;
        }
    }
}

// Step-response steady state, per unit input.
std::vector<State> steady_state(std::span<const Section> sos, double level) {
    std::vector<State> st(sos.size());
    for (std::size_t k = 0; k < sos.size(); ++k) {
        const auto& s = sos[k];
        st[k].z2 = (s.b2 - s.a2) * level;
        st[k].z1 = (s.b1 - s.a1) * level + st[k].z2;
    }
    return st;
}

} // namespace

std::vector<double> sos_filter(std::span<const Section> sos, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    std::vector<State> st(sos.size());
    run(sos, st, y);
    return y;
}

std::vector<double> butterworth_lowpass(std::span<const double> signal, const ButterworthConfig& cfg) {
    validate(cfg);
    if (signal.size() < 8) throw std::invalid_argument("butterworth: signal needs at least 8 samples");
    const auto sos = butterworth_design(cfg.order, cfg.cutoff);
    if (!cfg.zero_phase) return sos_filter(sos, signal);

    // Forward-backward pass over an odd reflection of the ends, each pass
    // started from the steady state of its first sample.
    std::size_t zero_b2 = 0, zero_a2 = 0;
    for (const auto& s : sos) {
        zero_b2 += s.b2 == 0.0;
        zero_a2 += s.a2 == 0.0;
    }
    const std::size_t n = signal.size();
    std::size_t pad = 3 * (2 * sos.size() + 1 - std::min(zero_b2, zero_a2));
    pad = std::min(pad, n - 1);

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * signal[0] - signal[i]);
    ext.insert(ext.end(), signal.begin(), signal.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * signal[n - 1] - signal[n - 1 - i]);

    auto st = steady_state(sos, ext.front());
    run(sos, st, ext);
    std::reverse(ext.begin(), ext.end());
    st = steady_state(sos, ext.front());
    run(sos, st, ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

} // namespace dasflow
