#include "dasflow/waterfall.hpp"

#include "dasflow/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace dasflow {

std::string encode_dasw(const WaterfallMatrix& m);

namespace {

constexpr std::array<unsigned char, 4> kMagic{0x44, 0x41, 0x53, 0x57}; // "DASW"
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 2 + 4 + 4 + 8 * 4;

static_assert(std::endian::native == std::endian::little,
              "DASW I/O assumes a little-endian host");

template <typename T>
void put(std::string& buf, T v) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    buf.append(bytes, sizeof(T));
}

template <typename T>
T get(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

void validate_sampling(const Sampling& s) {
    if (!(s.dt > 0.0) || !std::isfinite(s.dt))
        throw std::invalid_argument("waterfall: dt must be finite and > 0");
    if (!(s.dx > 0.0) || !std::isfinite(s.dx))
        throw std::invalid_argument("waterfall: dx must be finite and > 0");
    if (!std::isfinite(s.t0) || !std::isfinite(s.x0))
        throw std::invalid_argument("waterfall: t0/x0 must be finite");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::filesystem::path meta_path(const std::filesystem::path& p) {
    return std::filesystem::path(p.string() + ".meta.json");
}

WaterfallMatrix load_binary(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < kHeaderBytes) {
        if (data.size() >= 4 && std::memcmp(data.data(), kMagic.data(), 4) != 0)
            throw FormatError("bad magic");
        throw FormatError("truncated payload");
    }
    if (std::memcmp(data.data(), kMagic.data(), 4) != 0) throw FormatError("bad magic");
    const char* p = data.data() + 4;
    const auto version = get<std::uint16_t>(p);
    if (version != kVersion)
        throw FormatError("unsupported version " + std::to_string(version));
    p += 2;
    const auto rows = get<std::uint32_t>(p);
    const auto cols = get<std::uint32_t>(p + 4);
    p += 8;
    Sampling s;
    s.dt = get<double>(p);
    s.dx = get<double>(p + 8);
    s.t0 = get<double>(p + 16);
    s.x0 = get<double>(p + 24);
    if (rows == 0 || cols == 0) throw FormatError("empty matrix");
    const std::size_t count = std::size_t{rows} * cols;
    if (data.size() - kHeaderBytes < count * sizeof(float)) throw FormatError("truncated payload");
    if (data.size() - kHeaderBytes > count * sizeof(float))
        throw FormatError("trailing bytes after payload");
    if (!(s.dt > 0.0) || !(s.dx > 0.0) || !std::isfinite(s.dt) || !std::isfinite(s.dx) ||
        !std::isfinite(s.t0) || !std::isfinite(s.x0))
        throw FormatError("invalid sampling metadata");

    std::vector<double> values(count);
    const char* payload = data.data() + kHeaderBytes;
    for (std::size_t i = 0; i < count; ++i) {
        const float v = get<float>(payload + i * sizeof(float));
        if (!std::isfinite(v)) throw FormatError("non-finite value");
        values[i] = v;
    }
    return WaterfallMatrix(rows, cols, std::move(values), s);
}

void save_binary(const WaterfallMatrix& m, const std::filesystem::path& path) {
    write_file(path, encode_dasw(m));
}

double parse_double(std::string_view field, std::size_t line_no) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw FormatError("malformed number on line " + std::to_string(line_no));
    if (!std::isfinite(v)) throw FormatError("non-finite value");
    return v;
}

WaterfallMatrix load_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const auto field = line.substr(start, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - start);
            values.push_back(parse_double(field, line_no));
            ++count;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) cols = count;
        else if (count != cols) throw FormatError("inconsistent CSV row lengths");
        ++rows;
    }
    if (rows == 0) throw FormatError("empty CSV");

    Sampling s;
    const auto meta_file = meta_path(path);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(meta_file));
        s.dt = meta.at("dt").get<double>();
        s.dx = meta.at("dx").get<double>();
        s.t0 = meta.at("t0").get<double>();
        s.x0 = meta.at("x0").get<double>();
        if (meta.contains("gauge_length") && !meta.at("gauge_length").is_null())
            s.gauge_length = meta.at("gauge_length").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad metadata sidecar " + meta_file.string() + ": " + e.what());
    }
    if (!(s.dt > 0.0) || !(s.dx > 0.0)) throw FormatError("invalid sampling metadata");
    return WaterfallMatrix(rows, cols, std::move(values), s);
}

void save_csv(const WaterfallMatrix& m, const std::filesystem::path& path) {
    std::string out;
    out.reserve(m.values().size() * 12);
    char buf[64];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            // Shortest representation that round-trips exactly.
            const auto res = std::to_chars(buf, buf + sizeof(buf), row[c]);
            out.append(buf, res.ptr);
        }
        out.push_back('\n');
    }
    nlohmann::ordered_json meta;
    meta["dt"] = m.dt();
    meta["dx"] = m.dx();
    meta["t0"] = m.t0();
    meta["x0"] = m.x0();
    if (m.sampling().gauge_length) meta["gauge_length"] = *m.sampling().gauge_length;
    write_file(path, out);
    write_file(meta_path(path), meta.dump(2) + "\n");
}

} // namespace

WaterfallMatrix::WaterfallMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                                 Sampling sampling)
    : rows_(rows), cols_(cols), values_(std::move(values)), sampling_(sampling) {
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("waterfall: empty extent");
    if (values_.size() != rows_ * cols_)
        throw std::invalid_argument("waterfall: value count does not match extent");
    validate_sampling(sampling_);
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("waterfall: non-finite value");
}

std::vector<double> WaterfallMatrix::column(std::size_t c) const {
    if (c >= cols_) throw std::out_of_range("waterfall: column index out of range");
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = values_[r * cols_ + c];
    return out;
}

WaterfallMatrix WaterfallMatrix::with_values(std::vector<double> values) const {
    return WaterfallMatrix(rows_, cols_, std::move(values), sampling_);
}

bool operator==(const WaterfallMatrix& a, const WaterfallMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_ &&
           a.sampling_.dt == b.sampling_.dt && a.sampling_.dx == b.sampling_.dx &&
           a.sampling_.t0 == b.sampling_.t0 && a.sampling_.x0 == b.sampling_.x0;
}

std::string encode_dasw(const WaterfallMatrix& m) {
    if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
        m.cols() > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("save_waterfall: matrix too large for DASW v1");
    std::string buf;
    buf.reserve(kHeaderBytes + m.values().size() * sizeof(float));
    buf.append(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
    put<std::uint16_t>(buf, kVersion);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.cols()));
    put<double>(buf, m.dt());
    put<double>(buf, m.dx());
    put<double>(buf, m.t0());
    put<double>(buf, m.x0());
    for (double v : m.values()) put<float>(buf, static_cast<float>(v));
    return buf;
}

WaterfallFormat format_for_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext == ".csv" ? WaterfallFormat::csv : WaterfallFormat::binary;
}

WaterfallMatrix load_waterfall(const std::filesystem::path& path, WaterfallFormat format) {
    return format == WaterfallFormat::binary ? load_binary(path) : load_csv(path);
}

void save_waterfall(const WaterfallMatrix& m, const std::filesystem::path& path,
                    WaterfallFormat format) {
    if (format == WaterfallFormat::binary) save_binary(m, path);
    else save_csv(m, path);
}

WaterfallMatrix crop(const WaterfallMatrix& m, const WindowSelector& w) {
    if (!(w.row_start < w.row_end && w.row_end <= m.rows()))
        throw std::out_of_range("crop: row window out of bounds");
    if (!(w.col_start < w.col_end && w.col_end <= m.cols()))
        throw std::out_of_range("crop: column window out of bounds");
    const std::size_t rows = w.row_end - w.row_start;
    const std::size_t cols = w.col_end - w.col_start;
    std::vector<double> values;
    values.reserve(rows * cols);
    for (std::size_t r = w.row_start; r < w.row_end; ++r) {
        const auto src = m.row(r).subspan(w.col_start, cols);
        values.insert(values.end(), src.begin(), src.end());
    }
    Sampling s = m.sampling();
    s.t0 += static_cast<double>(w.row_start) * s.dt;
    s.x0 += static_cast<double>(w.col_start) * s.dx;
    return WaterfallMatrix(rows, cols, std::move(values), s);
}

WaterfallMatrix decimate_time(const WaterfallMatrix& m, std::size_t factor, Reducer reducer) {
    if (factor < 1) throw std::invalid_argument("decimate_time: factor must be >= 1");
    const std::size_t rows = m.rows() / factor;
    if (rows == 0) throw std::invalid_argument("decimate_time: factor exceeds row count");
    const std::size_t cols = m.cols();
    std::vector<double> values(rows * cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double* dst = values.data() + r * cols;
        for (std::size_t k = 0; k < factor; ++k) {
            const auto src = m.row(r * factor + k);
            for (std::size_t c = 0; c < cols; ++c) {
                if (reducer == Reducer::mean) dst[c] += src[c];
                else dst[c] = (k == 0) ? src[c] : std::max(dst[c], src[c]);
            }
        }
        if (reducer == Reducer::mean)
            for (std::size_t c = 0; c < cols; ++c) dst[c] /= static_cast<double>(factor);
    }
    Sampling s = m.sampling();
    s.dt *= static_cast<double>(factor);
    return WaterfallMatrix(rows, cols, std::move(values), s);
}

} // namespace dasflow
