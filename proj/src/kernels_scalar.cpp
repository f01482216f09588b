#include "malign/kernels.hpp"

namespace malign::kern {

static constexpr char kBase[4] = {'A', 'C', 'G', 'T'};

namespace {

void expand_bases_scalar(const uint8_t* bytes, size_t n, char* out) {
    for (size_t i = 0; i < n; ++i) {
        uint8_t b = bytes[i];
        out[4 * i + 0] = kBase[(b >> 6) & 3];
        out[4 * i + 1] = kBase[(b >> 4) & 3];
        out[4 * i + 2] = kBase[(b >> 2) & 3];
        out[4 * i + 3] = kBase[b & 3];
    }
}

void pack_codes_scalar(const char* bases, size_t n, uint8_t* codes) {
    for (size_t i = 0; i < n; ++i) {
        switch (bases[i]) {
            case 'A': codes[i] = 0; break;
            case 'C': codes[i] = 1; break;
            case 'G': codes[i] = 2; break;
            case 'T': codes[i] = 3; break;
            default: codes[i] = kInvalidCode; break;
        }
    }
}

size_t count_eq_scalar(const char* a, const char* b, size_t n) {
    size_t c = 0;
    for (size_t i = 0; i < n; ++i) c += (a[i] == b[i]);
    return c;
}

void add_column_counts_scalar(const char* row, size_t n, uint8_t* planes) {
    for (size_t j = 0; j < n; ++j) {
        switch (row[j]) {
            case 'A': planes[j]++; break;
            case 'C': planes[n + j]++; break;
            case 'G': planes[2 * n + j]++; break;
            case 'T': planes[3 * n + j]++; break;
            case '-': planes[4 * n + j]++; break;
            default: break;
        }
    }
}

double dot_scalar(const double* x, const double* y, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

}  // namespace

const Kernels& scalar() {
    static const Kernels k = {
        "scalar",
        expand_bases_scalar,
        pack_codes_scalar,
        count_eq_scalar,
        add_column_counts_scalar,
        dot_scalar,
        axpy_scalar,
        sum_scalar,
    };
    return k;
}

}  // namespace malign::kern
