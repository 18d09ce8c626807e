#ifndef PQGCN_COMMON_HPP
#define PQGCN_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pqgcn {

// Bad user input: config values, CLI arguments, malformed input files.
// The CLI maps this to exit code 1; any other exception exits 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void warn(const std::string& msg);
void info(const std::string& msg);

// Locale-independent formatting with enough digits to round-trip exactly.
std::string format_double(double v);
double parse_double(std::string_view s, const std::string& context);
long long parse_int(std::string_view s, const std::string& context);

std::string to_lower(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_char(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool ends_with(std::string_view s, std::string_view suffix);

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

// Deterministic RNG. mt19937_64 has a standardized bit stream and the double
// conversion below sidesteps the implementation-defined std distributions,
// so seeded runs are bit-identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    uint64_t below(uint64_t n) { return gen_() % n; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace pqgcn

#endif
