#pragma once

// Seeded generators for the property tests. Fixed seeds keep failures reproducible.

#include <complex>
#include <cstdint>
#include <random>

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    std::complex<double> complex_disk(double r) {
        const double rad = r * std::sqrt(uniform(0.0, 1.0));
        const double th = uniform(0.0, 6.283185307179586);
        return std::polar(rad, th);
    }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace gen
