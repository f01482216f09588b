#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops with scalar reference implementations and
// vectorized variants selected once at startup. Every entry point in the
// table is contractually equivalent to the scalar version; the test suite
// checks equivalence on randomized inputs.

namespace malign::kern {

inline constexpr uint8_t kInvalidCode = 0xff;

struct Kernels {
    const char* name;

    // Each input byte expands to 4 bases, most-significant bit pair first.
    // out must hold 4*n chars.
    void (*expand_bases)(const uint8_t* bytes, size_t n, char* out);

    // 'A','C','G','T' -> 0..3; anything else -> kInvalidCode.
    void (*pack_codes)(const char* bases, size_t n, uint8_t* codes);

    // Number of positions where a[i] == b[i].
    size_t (*count_eq)(const char* a, const char* b, size_t n);

    // planes = 5 contiguous arrays of n uint8 counters (A,C,G,T,'-').
    // Adds 1 to the plane of row[j] at column j. Counters must not be
    // allowed to reach 255 before the caller widens them.
    void (*add_column_counts)(const char* row, size_t n, uint8_t* planes);

    double (*dot)(const double* x, const double* y, size_t n);
    void (*axpy)(double a, const double* x, double* y, size_t n);
    double (*sum)(const double* x, size_t n);
};

// Reference implementations.
const Kernels& scalar();

// Best implementation for this CPU, chosen once. MALIGN_KERNELS=scalar in
// the environment forces the reference path.
const Kernels& active();

// Override the active table (tests).
void set_active(const Kernels& k);

// AVX2 table, or nullptr when unsupported by compiler or CPU.
const Kernels* avx2_if_supported();

}  // namespace malign::kern
