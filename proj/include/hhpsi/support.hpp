#pragma once

#include <algorithm>
#include <cctype>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hhpsi/errors.hpp"

namespace hhpsi {

/// Parse a complex literal of the form "a", "bi", "a+bi" or "a-bi", where a
/// and b are decimal numbers (exponents allowed) and the imaginary unit is a
/// trailing 'i' or 'I'.  Examples: "0.1", "-2.5e-3", "3i", "-i", "1+2i".
/// Throws invalid_input with a byte offset on malformed text.
std::complex<long double> parse_complex(std::string_view text);

/// Format with enough digits for an exact double round-trip ("%.17g").
std::string fmt_real(double x);

/// Format a complex number in the same "a+bi" syntax parse_complex accepts.
std::string fmt_complex(std::complex<double> z);

/// Chunked parallel loop over [0, n).  threads <= 1 runs serially; the body
/// must be safe to call concurrently on distinct indices.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace hhpsi
