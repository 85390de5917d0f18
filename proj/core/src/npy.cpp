#include <bit>
#include <cstring>
#include <string>

#include "segbias/error.hpp"
#include "segbias/ingest.hpp"

// Minimal NPY v1.0 codec. Everything outside little-endian float32/float64
// C-order rank-2 arrays is an explicit unsupported-format error.

namespace segbias::ingest {
namespace {

constexpr unsigned char kMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};

static_assert(std::endian::native == std::endian::little,
              "NPY codec assumes a little-endian host");

std::string find_dict_value(const std::string& header, const std::string& key) {
    auto pos = header.find("'" + key + "'");
    if (pos == std::string::npos)
        throw Error::input("npy: header missing key '" + key + "'");
    pos = header.find(':', pos);
    if (pos == std::string::npos) throw Error::input("npy: malformed header dict");
    ++pos;
    while (pos < header.size() && (header[pos] == ' ' || header[pos] == '\t')) ++pos;
    std::size_t end = pos;
    if (header[pos] == '\'') {
        end = header.find('\'', pos + 1);
        if (end == std::string::npos) throw Error::input("npy: unterminated string in header");
        return header.substr(pos + 1, end - pos - 1);
    }
    if (header[pos] == '(') {
        end = header.find(')', pos);
        if (end == std::string::npos) throw Error::input("npy: unterminated tuple in header");
        return header.substr(pos, end - pos + 1);
    }
    while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
    std::string value = header.substr(pos, end - pos);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t')) value.pop_back();
    return value;
}

std::vector<std::int64_t> parse_shape(const std::string& tuple) {
    std::vector<std::int64_t> dims;
    std::string digits;
    for (char c : tuple) {
        if (c >= '0' && c <= '9') {
            digits += c;
        } else if (!digits.empty()) {
            dims.push_back(std::stoll(digits));
            digits.clear();
        }
    }
    if (!digits.empty()) dims.push_back(std::stoll(digits));
    return dims;
}

}  // namespace

FeatureMatrix parse_feature_file(std::span<const std::byte> bytes, FeatureOrientation orientation) {
    if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0)
        throw Error::input("npy: bad magic, not an NPY file");
    unsigned char major = std::to_integer<unsigned char>(bytes[6]);
    unsigned char minor = std::to_integer<unsigned char>(bytes[7]);
    if (major != 1 || minor != 0)
        throw Error::input("npy: unsupported version " + std::to_string(major) + "." +
                           std::to_string(minor) + " (only 1.0)");
    std::uint16_t header_len = static_cast<std::uint16_t>(std::to_integer<unsigned char>(bytes[8])) |
                               (static_cast<std::uint16_t>(std::to_integer<unsigned char>(bytes[9])) << 8);
    if (bytes.size() < 10u + header_len) throw Error::input("npy: truncated header");
    std::string header(reinterpret_cast<const char*>(bytes.data()) + 10, header_len);

    std::string descr = find_dict_value(header, "descr");
    std::string fortran = find_dict_value(header, "fortran_order");
    std::string shape_tuple = find_dict_value(header, "shape");

    if (fortran != "False")
        throw Error::input("npy: column-major (fortran_order) arrays are unsupported");
    FeatureDType dtype;
    if (descr == "<f4")
        dtype = FeatureDType::f32;
    else if (descr == "<f8")
        dtype = FeatureDType::f64;
    else
        throw Error::input("npy: unsupported dtype '" + descr + "' (only <f4 and <f8)");

    auto dims = parse_shape(shape_tuple);
    if (dims.size() != 2)
        throw Error::input("npy: expected a 2-D array, got rank " + std::to_string(dims.size()));
    std::int64_t rows = dims[0], cols = dims[1];
    if (rows < 1 || cols < 1) throw Error::input("npy: empty array dimension");

    std::size_t item = dtype == FeatureDType::f32 ? 4 : 8;
    std::size_t expected = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * item;
    std::span<const std::byte> payload = bytes.subspan(10 + header_len);
    if (payload.size() < expected) throw Error::input("npy: payload shorter than shape");
    if (payload.size() > expected) throw Error::input("npy: payload longer than shape");

    std::vector<double> values(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    if (dtype == FeatureDType::f32) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            float v;
            std::memcpy(&v, payload.data() + i * 4, 4);
            values[i] = static_cast<double>(v);
        }
    } else {
        std::memcpy(values.data(), payload.data(), expected);
    }

    if (orientation == FeatureOrientation::dims_by_frames) {
        // On-disk (D, T) -> in-memory (T, D).
        std::vector<double> transposed(values.size());
        for (std::int64_t d = 0; d < rows; ++d)
            for (std::int64_t t = 0; t < cols; ++t)
                transposed[t * rows + d] = values[d * cols + t];
        return FeatureMatrix::make(cols, rows, std::move(transposed), dtype);
    }
    return FeatureMatrix::make(rows, cols, std::move(values), dtype);
}

std::vector<std::byte> write_feature_file(const FeatureMatrix& matrix, FeatureOrientation orientation) {
    std::int64_t rows = matrix.rows(), cols = matrix.cols();
    bool transpose = orientation == FeatureOrientation::dims_by_frames;
    std::int64_t file_rows = transpose ? cols : rows;
    std::int64_t file_cols = transpose ? rows : cols;

    std::string dict = "{'descr': '";
    dict += matrix.dtype() == FeatureDType::f32 ? "<f4" : "<f8";
    dict += "', 'fortran_order': False, 'shape': (";
    dict += std::to_string(file_rows) + ", " + std::to_string(file_cols) + "), }";
    // Pad with spaces so the full header is 64-byte aligned, newline last.
    std::size_t unpadded = 10 + dict.size() + 1;
    std::size_t padding = (64 - unpadded % 64) % 64;
    dict.append(padding, ' ');
    dict += '\n';

    std::size_t item = matrix.dtype() == FeatureDType::f32 ? 4 : 8;
    std::size_t payload_size = matrix.values().size() * item;
    std::vector<std::byte> out(10 + dict.size() + payload_size);
    std::memcpy(out.data(), kMagic, 6);
    out[6] = std::byte{1};
    out[7] = std::byte{0};
    auto header_len = static_cast<std::uint16_t>(dict.size());
    out[8] = std::byte{static_cast<unsigned char>(header_len & 0xff)};
    out[9] = std::byte{static_cast<unsigned char>(header_len >> 8)};
    std::memcpy(out.data() + 10, dict.data(), dict.size());

    std::byte* payload = out.data() + 10 + dict.size();
    auto value_at = [&](std::size_t i) {
        if (!transpose) return matrix.values()[i];
        std::int64_t d = static_cast<std::int64_t>(i) / file_cols;  // file row = feature dim
        std::int64_t t = static_cast<std::int64_t>(i) % file_cols;  // file col = frame
        return matrix.at(t, d);
    };
    if (matrix.dtype() == FeatureDType::f32) {
        for (std::size_t i = 0; i < matrix.values().size(); ++i) {
            float v = static_cast<float>(value_at(i));
            std::memcpy(payload + i * 4, &v, 4);
        }
    } else {
        for (std::size_t i = 0; i < matrix.values().size(); ++i) {
            double v = value_at(i);
            std::memcpy(payload + i * 8, &v, 8);
        }
    }
    return out;
}

}  // namespace segbias::ingest
