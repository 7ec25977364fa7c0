#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qtfkit {

/// Real-to-half-complex forward transform: n real samples in, n/2 + 1 bins
/// out, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// Inverse of rfft for an n-sample real signal, normalized by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace qtfkit
