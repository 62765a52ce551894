#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include <bsvd/matrix.hpp>

namespace bsvd {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A batch of matrices sharing one field.
using AnyBatch = std::variant<std::vector<Matrix<float>>, std::vector<Matrix<double>>,
                              std::vector<Matrix<std::complex<float>>>,
                              std::vector<Matrix<std::complex<double>>>>;

Dtype dtype_of(const AnyBatch &b);
std::size_t batch_size(const AnyBatch &b);

/// Binary layout, all integers and elements little-endian:
///
///     "BSVD" | version u8 = 1 | dtype u8 | 0 u8 | 0 u8 | count u32
///     count x ( m u32 | n u32 | m*n elements, column-major )
///
/// dtype: 0 = f32, 1 = f64, 2 = complex f32, 3 = complex f64; complex
/// elements are stored as adjacent (re, im).
inline constexpr std::uint8_t bsvd_format_version = 1;

std::vector<std::uint8_t> serialize(const AnyBatch &batch);
/// Throws FormatError on bad magic/version/dtype, truncation or trailing bytes.
AnyBatch parse(std::span<const std::uint8_t> bytes);

void write_bsvd(const std::filesystem::path &path, const AnyBatch &batch);
AnyBatch read_bsvd(const std::filesystem::path &path);

} // namespace bsvd
