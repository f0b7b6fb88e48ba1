#include "dasflow/wavelet.hpp"

#include "dasflow/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace dasflow::wavelet {

namespace {

Wavelet make(std::string name, std::vector<double> lo) {
    const std::size_t n = lo.size();
    std::vector<double> hi(n);
    for (std::size_t j = 0; j < n; ++j) hi[j] = ((j % 2 == 0) ? -1.0 : 1.0) * lo[n - 1 - j];
    return {std::move(name), std::move(lo), std::move(hi)};
}

const std::vector<Wavelet>& registry() {
    static const std::vector<Wavelet> all = {
        make("haar", {0.7071067811865476, 0.7071067811865476}),
        make("db2", {-0.12940952255092145, 0.22414386804185735, 0.836516303737469, 0.48296291314469025}),
        make("db3", {0.035226291882100656, -0.08544127388224149, -0.13501102001039084, 0.4598775021193313,
                     0.8068915093133388, 0.3326705529509569}),
        make("db4", {-0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.18703481171888114,
                     -0.02798376941698385, 0.6308807679295904, 0.7148465705525415, 0.23037781330885523}),
        make("sym4", {-0.07576571478927333, -0.02963552764599851, 0.49761866763201545, 0.8037387518059161,
                      0.29785779560527736, -0.09921954357684722, -0.012603967262037833, 0.0322231006040427}),
    };
    return all;
}

// Index into a half-sample symmetric extension of a length-n signal.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    std::ptrdiff_t k = i % period;
    if (k < 0) k += period;
    return static_cast<std::size_t>(k < static_cast<std::ptrdiff_t>(n) ? k : period - 1 - k);
}

void analyze(std::span<const double> x, const Wavelet& w, std::vector<double>& approx,
             std::vector<double>& detail) {
    const std::size_t n = x.size();
    const std::size_t taps = w.taps();
    const std::size_t pad = taps - 1;
    std::vector<double> ext(n + 2 * pad);
    for (std::size_t i = 0; i < ext.size(); ++i)
        ext[i] = x[reflect(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad), n)];
    const std::size_t out_len = (n + taps - 1) / 2;
    approx.assign(out_len, 0.0);
    detail.assign(out_len, 0.0);
    kernels::analysis_filter(ext, w.dec_lo, approx);
    kernels::analysis_filter(ext, w.dec_hi, detail);
}

// Adjoint of analyze() restricted to [0, n); exact inverse for orthogonal filters.
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               const Wavelet& w, std::size_t n) {
    const auto taps = static_cast<std::ptrdiff_t>(w.taps());
    const auto count = static_cast<std::ptrdiff_t>(approx.size());
    std::vector<double> x(n, 0.0);
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, i / 2);
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(count - 1, (i + taps - 2) / 2);
        double acc = 0.0;
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
            const std::ptrdiff_t j = 2 * k + 1 - i;
            if (j < 0 || j >= taps) continue;
            acc += approx[k] * w.dec_lo[j] + detail[k] * w.dec_hi[j];
        }
        x[i] = acc;
    }
    return x;
}

} // namespace

const Wavelet& by_name(std::string_view name) {
    if (name == "db1") name = "haar";
    for (const auto& w : registry())
        if (w.name == name) return w;
    throw std::invalid_argument("unknown wavelet '" + std::string(name) + "'");
}

int max_level(std::size_t signal_length, const Wavelet& w) {
    const std::size_t support = w.taps() - 1;
    if (support == 0 || signal_length < support) return 0;
    return static_cast<int>(std::floor(std::log2(static_cast<double>(signal_length) /
                                                 static_cast<double>(support))));
}

Decomposition wavedec(std::span<const double> signal, const Wavelet& w, int levels) {
    if (levels < 1) throw std::invalid_argument("wavedec: levels must be >= 1");
    if (levels > max_level(signal.size(), w))
        throw std::invalid_argument("wavedec: signal of length " + std::to_string(signal.size()) +
                                    " is shorter than the " + w.name + " support at level " +
                                    std::to_string(levels));
    Decomposition d;
    std::vector<double> current(signal.begin(), signal.end());
    for (int level = 0; level < levels; ++level) {
        std::vector<double> approx, detail;
        d.input_lengths.push_back(current.size());
        analyze(current, w, approx, detail);
        d.details.push_back(std::move(detail));
        current = std::move(approx);
    }
    d.approx = std::move(current);
    return d;
}

std::vector<double> waverec(const Decomposition& d, const Wavelet& w) {
    std::vector<double> current = d.approx;
    for (std::size_t level = d.details.size(); level-- > 0;)
        current = synthesize(current, d.details[level], w, d.input_lengths[level]);
    return current;
}

} // namespace dasflow::wavelet
