#include "dasflow/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dasflow::kernels {

namespace {

Isa detect_best() noexcept {
    if (const char* env = std::getenv("DASFLOW_SIMD"); env && std::string(env) == "scalar")
        return Isa::scalar;
    if (isa_available(Isa::avx2)) return Isa::avx2;
    return Isa::scalar;
}

std::atomic<int>& forced() {
    static std::atomic<int> value{-1};
    return value;
}

} // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(DASFLOW_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept {
    static const Isa best = detect_best();
    const int f = forced().load(std::memory_order_relaxed);
    return f < 0 ? best : static_cast<Isa>(f);
}

void force_isa(Isa isa) {
    if (!isa_available(isa))
        throw std::invalid_argument("ISA not available on this host: " + std::string(isa_name(isa)));
    forced().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() noexcept { forced().store(-1, std::memory_order_relaxed); }

const KernelTable& table(Isa isa) {
    switch (isa) {
    case Isa::scalar: return scalar::kTable;
    case Isa::avx2:
#if defined(DASFLOW_HAVE_AVX2)
        if (isa_available(Isa::avx2)) return avx2::kTable;
#endif
        break;
    }
    throw std::invalid_argument("no kernel table for ISA " + std::string(isa_name(isa)));
}

} // namespace dasflow::kernels
