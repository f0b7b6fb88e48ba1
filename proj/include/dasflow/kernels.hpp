#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; an AVX2 variant is selected at runtime when the host
// supports it. Element-wise kernels are bitwise identical across variants;
// reductions agree to rounding (different summation order).

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace dasflow::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

// Best available ISA unless overridden by force_isa() or the
// DASFLOW_SIMD=scalar environment variable.
Isa active_isa() noexcept;
void force_isa(Isa isa);  // throws if unavailable
void reset_isa() noexcept;

struct MinMax {
    double min;
    double max;
};

// Geometry of one vehicle, pre-reduced for the response kernel.
struct WheelSet {
    double scale = 0.0;          // F / (4 pi G)
    double poisson_term = 0.0;   // 2 nu - 1
    double depth = 0.0;          // d_z
    double half_gauge = 0.0;     // l / 2
    std::array<double, 4> along{};    // alpha_i
    std::array<double, 4> across{};   // d_y + beta_i
    std::array<double, 4> weight{};   // w_i
};

// Function table for one ISA.
struct KernelTable {
    MinMax (*minmax)(std::span<const double> x);
    // out[i] = (x[i] - offset) / divisor
    void (*shift_divide)(std::span<const double> x, double offset, double divisor, std::span<double> out);
    double (*sum_sq_diff)(std::span<const double> a, std::span<const double> b);
    // {sum x, sum y, sum x^2, sum y^2, sum xy}
    std::array<double, 5> (*moments)(std::span<const double> x, std::span<const double> y);
    // out[k] = sum_j filter[j] * ext[2k + L - j], L = filter.size()
    void (*analysis_filter)(std::span<const double> ext, std::span<const double> filter,
                            std::span<double> out);
    // out[i] += |k_x2 - k_x1| at sensor offset first + i * step
    void (*vehicle_response)(const WheelSet& w, double first, double step, std::span<double> out);
};

const KernelTable& table(Isa isa);
inline const KernelTable& active() { return table(active_isa()); }

inline MinMax minmax(std::span<const double> x) { return active().minmax(x); }
inline void shift_divide(std::span<const double> x, double offset, double divisor, std::span<double> out) {
    active().shift_divide(x, offset, divisor, out);
}
inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    return active().sum_sq_diff(a, b);
}
inline std::array<double, 5> moments(std::span<const double> x, std::span<const double> y) {
    return active().moments(x, y);
}
inline void analysis_filter(std::span<const double> ext, std::span<const double> filter,
                            std::span<double> out) {
    active().analysis_filter(ext, filter, out);
}
inline void vehicle_response(const WheelSet& w, double first, double step, std::span<double> out) {
    active().vehicle_response(w, first, step, out);
}

namespace scalar {
extern const KernelTable kTable;
}
#if defined(DASFLOW_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

} // namespace dasflow::kernels
