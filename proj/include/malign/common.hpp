#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace malign {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file/line errors (hexdump, FASTA, MAF, TOML, CSV readers).
struct parse_error : error {
    parse_error(const std::string& what, const std::string& file, size_t line)
        : error(file + ":" + std::to_string(line) + ": " + what), file(file), line(line) {}
    std::string file;
    size_t line;
};

// DP matrix would exceed the configured cell budget.
struct budget_error : error {
    using error::error;
};

// Deterministic RNG used everywhere randomness is needed. Wraps a fixed
// 64-bit generator and hand-rolled draws so results do not depend on
// libstdc++'s distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next_u64() {
        // xorshift* — small, fast, reproducible
        uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // uniform in [0, n)
    uint64_t below(uint64_t n) { return n ? next_u64() % n : 0; }

    // uniform in [0, 1)
    double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    uint8_t byte() { return static_cast<uint8_t>(next_u64() & 0xff); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::vector<uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes);

// Sorted list of regular files in a directory, optionally filtered by extension.
std::vector<std::string> list_files(const std::string& dir, const std::string& ext = "");

// Filename without directory or final extension; used as sample id.
std::string file_stem(const std::string& path);

void log_info(const std::string& msg);
void log_warn(const std::string& msg);

}  // namespace malign
