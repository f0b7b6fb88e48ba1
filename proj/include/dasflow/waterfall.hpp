#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dasflow {

struct Sampling {
    double dt = 1.0;  // seconds per row
    double dx = 1.0;  // meters per column
    double t0 = 0.0;  // epoch seconds of row 0
    double x0 = 0.0;  // meters of column 0
    // Interrogator gauge length, carried through the CSV sidecar only.
    std::optional<double> gauge_length;
};

// Dense time x distance amplitude grid, row-major (one row per time sample).
// Immutable after construction.
class WaterfallMatrix {
public:
    WaterfallMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                    Sampling sampling);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const Sampling& sampling() const noexcept { return sampling_; }
    double dt() const noexcept { return sampling_.dt; }
    double dx() const noexcept { return sampling_.dx; }
    double t0() const noexcept { return sampling_.t0; }
    double x0() const noexcept { return sampling_.x0; }

    double at(std::size_t row, std::size_t col) const noexcept {
        return values_[row * cols_ + col];
    }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double> column(std::size_t c) const;

    double time_of(double row) const noexcept { return sampling_.t0 + row * sampling_.dt; }
    double position_of(double col) const noexcept { return sampling_.x0 + col * sampling_.dx; }

    // Same sampling, new values (shape must match).
    WaterfallMatrix with_values(std::vector<double> values) const;

    friend bool operator==(const WaterfallMatrix& a, const WaterfallMatrix& b);

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
    Sampling sampling_;
};

// Half-open index window [row_start, row_end) x [col_start, col_end).
struct WindowSelector {
    std::size_t row_start = 0;
    std::size_t row_end = 0;
    std::size_t col_start = 0;
    std::size_t col_end = 0;
};

enum class WaterfallFormat { binary, csv };

enum class Reducer { mean, max };

WaterfallMatrix load_waterfall(const std::filesystem::path& path, WaterfallFormat format);
void save_waterfall(const WaterfallMatrix& m, const std::filesystem::path& path,
                    WaterfallFormat format);

// DASW v1 file image of `m`.
std::string encode_dasw(const WaterfallMatrix& m);

// Picks the format from the extension: ".csv" is CSV, anything else DASW.
WaterfallFormat format_for_path(const std::filesystem::path& path);

WaterfallMatrix crop(const WaterfallMatrix& m, const WindowSelector& w);
WaterfallMatrix decimate_time(const WaterfallMatrix& m, std::size_t factor, Reducer reducer);

} // namespace dasflow
