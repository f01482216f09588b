#include "malign/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define MALIGN_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace malign::kern {

#ifdef MALIGN_HAVE_AVX2_KERNELS

#define AVX2_FN __attribute__((target("avx2,bmi2")))

namespace {

// Per input byte we emit base(b>>6), base(b>>4&3), base(b>>2&3), base(b&3).
// Split every byte into its two nibbles, then map each nibble to its two
// bases with 16-entry shuffles and interleave.
AVX2_FN void expand_bases_avx2(const uint8_t* bytes, size_t n, char* out) {
    // LUT1: first base of a nibble (bits 3-2), LUT2: second base (bits 1-0)
    const __m128i lut1 = _mm_setr_epi8('A', 'A', 'A', 'A', 'C', 'C', 'C', 'C',
                                       'G', 'G', 'G', 'G', 'T', 'T', 'T', 'T');
    const __m128i lut2 = _mm_setr_epi8('A', 'C', 'G', 'T', 'A', 'C', 'G', 'T',
                                       'A', 'C', 'G', 'T', 'A', 'C', 'G', 'T');
    const __m128i mask0f = _mm_set1_epi8(0x0f);

    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m128i v = _mm_loadu_si128(reinterpret_cast<const __m128i*>(bytes + i));
        __m128i hi = _mm_and_si128(_mm_srli_epi16(v, 4), mask0f);
        __m128i lo = _mm_and_si128(v, mask0f);
        // nibble stream in byte order: hi0,lo0,hi1,lo1,...
        __m128i nib_a = _mm_unpacklo_epi8(hi, lo);  // bytes 0..7
        __m128i nib_b = _mm_unpackhi_epi8(hi, lo);  // bytes 8..15

        __m128i a1 = _mm_shuffle_epi8(lut1, nib_a);
        __m128i a2 = _mm_shuffle_epi8(lut2, nib_a);
        __m128i b1 = _mm_shuffle_epi8(lut1, nib_b);
        __m128i b2 = _mm_shuffle_epi8(lut2, nib_b);

        char* o = out + 4 * i;
        _mm_storeu_si128(reinterpret_cast<__m128i*>(o), _mm_unpacklo_epi8(a1, a2));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(o + 16), _mm_unpackhi_epi8(a1, a2));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(o + 32), _mm_unpacklo_epi8(b1, b2));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(o + 48), _mm_unpackhi_epi8(b1, b2));
    }
    static constexpr char kBase[4] = {'A', 'C', 'G', 'T'};
    for (; i < n; ++i) {
        uint8_t b = bytes[i];
        out[4 * i + 0] = kBase[(b >> 6) & 3];
        out[4 * i + 1] = kBase[(b >> 4) & 3];
        out[4 * i + 2] = kBase[(b >> 2) & 3];
        out[4 * i + 3] = kBase[b & 3];
    }
}

// The low nibble distinguishes A/C/G/T ('A'=0x41,'C'=0x43,'G'=0x47,'T'=0x54);
// a decode-back comparison rejects every other byte sharing a nibble.
AVX2_FN void pack_codes_avx2(const char* bases, size_t n, uint8_t* codes) {
    const __m256i nib2code = _mm256_setr_epi8(
        -128, 0, -128, 1, 3, -128, -128, 2, -128, -128, -128, -128, -128, -128, -128, -128,
        -128, 0, -128, 1, 3, -128, -128, 2, -128, -128, -128, -128, -128, -128, -128, -128);
    const __m256i code2char = _mm256_setr_epi8(
        'A', 'C', 'G', 'T', 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
        'A', 'C', 'G', 'T', 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0);
    const __m256i mask0f = _mm256_set1_epi8(0x0f);
    const __m256i invalid = _mm256_set1_epi8(static_cast<char>(kInvalidCode));

    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bases + i));
        __m256i cand = _mm256_shuffle_epi8(nib2code, _mm256_and_si256(v, mask0f));
        __m256i back = _mm256_shuffle_epi8(code2char, cand);  // 0 where cand has high bit
        __m256i ok = _mm256_cmpeq_epi8(back, v);
        __m256i r = _mm256_blendv_epi8(invalid, cand, ok);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(codes + i), r);
    }
    for (; i < n; ++i) {
        switch (bases[i]) {
            case 'A': codes[i] = 0; break;
            case 'C': codes[i] = 1; break;
            case 'G': codes[i] = 2; break;
            case 'T': codes[i] = 3; break;
            default: codes[i] = kInvalidCode; break;
        }
    }
}

AVX2_FN size_t count_eq_avx2(const char* a, const char* b, size_t n) {
    size_t c = 0;
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        uint32_t m = static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)));
        c += static_cast<size_t>(__builtin_popcount(m));
    }
    for (; i < n; ++i) c += (a[i] == b[i]);
    return c;
}

AVX2_FN void add_column_counts_avx2(const char* row, size_t n, uint8_t* planes) {
    static const char kLetters[5] = {'A', 'C', 'G', 'T', '-'};
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + i));
        for (int p = 0; p < 5; ++p) {
            uint8_t* plane = planes + static_cast<size_t>(p) * n + i;
            __m256i cnt = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(plane));
            __m256i m = _mm256_cmpeq_epi8(v, _mm256_set1_epi8(kLetters[p]));
            // mask bytes are -1, so subtracting adds 1 where equal
            cnt = _mm256_sub_epi8(cnt, m);
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(plane), cnt);
        }
    }
    for (; i < n; ++i) {
        for (int p = 0; p < 5; ++p)
            if (row[i] == kLetters[p]) planes[static_cast<size_t>(p) * n + i]++;
    }
}

AVX2_FN double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

AVX2_FN double dot_avx2(const double* x, const double* y, size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        s1 = _mm256_add_pd(s1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    if (i + 4 <= n) {
        s0 = _mm256_add_pd(s0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        i += 4;
    }
    double s = hsum_pd(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

AVX2_FN void axpy_avx2(double a, const double* x, double* y, size_t n) {
    __m256d va = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

AVX2_FN double sum_avx2(const double* x, size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) s0 = _mm256_add_pd(s0, _mm256_loadu_pd(x + i));
    double s = hsum_pd(s0);
    for (; i < n; ++i) s += x[i];
    return s;
}

}  // namespace

const Kernels* avx2_if_supported() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Kernels k = {
        "avx2",
        expand_bases_avx2,
        pack_codes_avx2,
        count_eq_avx2,
        add_column_counts_avx2,
        dot_avx2,
        axpy_avx2,
        sum_avx2,
    };
    return &k;
}

#else

const Kernels* avx2_if_supported() { return nullptr; }

#endif  // MALIGN_HAVE_AVX2_KERNELS

}  // namespace malign::kern
