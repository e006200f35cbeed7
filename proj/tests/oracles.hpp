#pragma once

// Brute-force reference computations for the tests. Nothing here calls the
// library code paths it is used to check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qmc::oracle {

/// Hadamard codeword of the bit string `x` (first char = first message bit),
/// evaluated as sum_i x_i * a_i mod 2 with the mask `a` spelled out as a
/// string of the same length, masks enumerated in lexicographic order.
inline std::string hadamard_encode(const std::string& x) {
    const std::size_t n = x.size();
    std::string out;
    for (std::size_t a = 0; a < (std::size_t{1} << n); ++a) {
        std::string mask(n, '0');
        for (std::size_t i = 0; i < n; ++i) {
            if ((a >> (n - 1 - i)) & 1U) mask[i] = '1';
        }
        int parity = 0;
        for (std::size_t i = 0; i < n; ++i) parity += (x[i] - '0') * (mask[i] - '0');
        out.push_back(static_cast<char>('0' + parity % 2));
    }
    return out;
}

inline std::size_t hamming(const std::string& a, const std::string& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

inline std::string to_bits(std::uint64_t v, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
        if ((v >> (n - 1 - i)) & 1U) s[i] = '1';
    }
    return s;
}

/// Overlap of two +-1 phase states computed from the amplitudes.
inline double amplitude_overlap(const std::string& a, const std::string& b) {
    const double norm = 1.0 / static_cast<double>(a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] == '1' ? -1.0 : 1.0) * (b[i] == '1' ? -1.0 : 1.0);
    return s * norm;
}

/// Calls f(indices) for every k-subset of {0..m-1}.
template <class F>
void for_each_subset(std::size_t m, std::size_t k, F&& f) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > m) return;
    for (;;) {
        f(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace qmc::oracle
