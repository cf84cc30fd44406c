#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/strings.hpp"

namespace interfuse::ingest {

/// One id-tagged float vector. Descriptor files reuse the same container and
/// repeat an image id once per local descriptor.
struct DenseVector {
    std::string id;
    std::vector<float> values;

    [[nodiscard]] std::size_t dim() const { return values.size(); }
    bool operator==(const DenseVector&) const = default;
};

enum class VectorFormat { ifv1, tsv };

inline constexpr std::array<char, 4> kVectorMagic = {'I', 'F', 'V', '1'};

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    ByteReader(std::string_view data, const std::string& path) : data_(data), path_(path) {}

    std::string_view take(std::size_t n) {
        if (data_.size() - pos_ < n) {
            throw ValidationError(path_ + ": truncated vector file at byte " + std::to_string(pos_));
        }
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::uint16_t u16() {
        auto b = take(2);
        return static_cast<std::uint16_t>(static_cast<unsigned char>(b[0]) |
                                          (static_cast<unsigned char>(b[1]) << 8));
    }

    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }

    [[nodiscard]] bool at_end() const { return pos_ == data_.size(); }
    [[nodiscard]] std::size_t offset() const { return pos_; }

private:
    std::string_view data_;
    const std::string& path_;
    std::size_t pos_ = 0;
};

inline void check_finite(const DenseVector& v, const std::string& where) {
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        if (!std::isfinite(v.values[i])) {
            throw ValidationError(where + ": non-finite component " + std::to_string(i) + " in vector '" + v.id + "'");
        }
    }
}

inline std::vector<DenseVector> decode_ifv1(std::string_view bytes, const std::string& path) {
    ByteReader r(bytes, path);
    r.take(4);
    const std::uint32_t count = r.u32();
    const std::uint32_t dim = r.u32();
    if (dim == 0 && count > 0) throw ValidationError(path + ": zero dimension with non-empty vector set");
    std::vector<DenseVector> out;
    out.reserve(count);
    for (std::uint32_t n = 0; n < count; ++n) {
        DenseVector v;
        const std::uint16_t len = r.u16();
        v.id = std::string(r.take(len));
        v.values.resize(dim);
        for (auto& x : v.values) x = r.f32();
        check_finite(v, path);
        out.push_back(std::move(v));
    }
    if (!r.at_end()) {
        throw ValidationError(path + ": " + std::to_string(bytes.size() - r.offset()) +
                              " trailing bytes after " + std::to_string(count) + " vectors");
    }
    return out;
}

// TSV fallback: id <TAB> v1 <TAB> v2 ...
inline std::vector<DenseVector> decode_tsv(std::string_view text, const std::string& path) {
    std::vector<DenseVector> out;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    for (auto line : split_on(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;
        auto fields = split_on(line, '\t');
        if (fields.size() < 2) throw ValidationError(location(path, line_no) + ": vector row needs an id and components");
        DenseVector v;
        v.id = std::string(fields[0]);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            auto x = parse_float(trim(fields[i]));
            if (!x) {
                throw ValidationError(location(path, line_no) + ": component '" + std::string(fields[i]) +
                                      "' of vector '" + v.id + "' is not a number");
            }
            v.values.push_back(*x);
        }
        check_finite(v, location(path, line_no));
        if (out.empty()) {
            dim = v.dim();
        } else if (v.dim() != dim) {
            throw ValidationError(location(path, line_no) + ": dimension mismatch: vector '" + v.id + "' has dim " +
                                  std::to_string(v.dim()) + ", expected " + std::to_string(dim));
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace detail

/// Uniform dimension of a vector set; throws on mismatch. 0 for an empty set.
inline std::size_t common_dim(const std::vector<DenseVector>& vectors) {
    if (vectors.empty()) return 0;
    const std::size_t dim = vectors.front().dim();
    for (const auto& v : vectors) {
        if (v.dim() != dim) {
            throw ValidationError("dimension mismatch: vector '" + v.id + "' has dim " + std::to_string(v.dim()) +
                                  ", expected " + std::to_string(dim));
        }
    }
    return dim;
}

inline std::string encode_ifv1(const std::vector<DenseVector>& vectors) {
    const std::size_t dim = common_dim(vectors);
    if (!vectors.empty() && dim == 0) throw ValidationError("cannot encode zero-dimensional vectors");
    std::string out(kVectorMagic.begin(), kVectorMagic.end());
    detail::put_u32(out, static_cast<std::uint32_t>(vectors.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(dim));
    for (const auto& v : vectors) {
        detail::check_finite(v, "encode");
        if (v.id.size() > 0xFFFF) throw ValidationError("vector id longer than 65535 bytes");
        detail::put_u16(out, static_cast<std::uint16_t>(v.id.size()));
        out += v.id;
        for (float x : v.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(x));
    }
    return out;
}

/// Reads an IFV1 binary file, or the TSV fallback when the magic is absent.
inline std::vector<DenseVector> load_vectors(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kVectorMagic.data(), 4) == 0) {
        return detail::decode_ifv1(bytes, path);
    }
    return detail::decode_tsv(bytes, path);
}

inline void write_vectors(const std::vector<DenseVector>& vectors, const std::string& path,
                          VectorFormat format = VectorFormat::ifv1) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    if (format == VectorFormat::ifv1) {
        out << encode_ifv1(vectors);
    } else {
        common_dim(vectors);
        for (const auto& v : vectors) {
            detail::check_finite(v, "encode");
            out << v.id;
            for (float x : v.values) out << '\t' << format_exact(x);
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Groups vectors by id, preserving first-appearance order of ids and the
/// order of vectors within an id.
inline std::vector<std::pair<std::string, std::vector<std::vector<float>>>>
group_by_id(const std::vector<DenseVector>& vectors) {
    std::vector<std::pair<std::string, std::vector<std::vector<float>>>> out;
    std::map<std::string, std::size_t> index;
    for (const auto& v : vectors) {
        auto [it, inserted] = index.try_emplace(v.id, out.size());
        if (inserted) out.emplace_back(v.id, std::vector<std::vector<float>>{});
        out[it->second].second.push_back(v.values);
    }
    return out;
}

}  // namespace interfuse::ingest
