#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace polymax {

// Deterministic splittable RNG. All randomness in the library flows from a
// single seed through child(), so every branch of a pipeline can be replayed
// independently of the others.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Counter-based split: child streams never collide with the parent.
    Rng child(std::uint64_t label) const {
        return Rng(mix(state_ ^ mix(label + 0x632be59bd9b4e019ull)));
    }

    Rng child(const std::string& label) const {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return child(h);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int sign() { return (next_u64() & 1) ? 1 : -1; }

    // Box-Muller; platform-independent unlike std::normal_distribution.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    std::vector<double> sign_vector(int n) {
        std::vector<double> v(n);
        for (auto& x : v) x = static_cast<double>(sign());
        return v;
    }

    std::vector<double> gaussian_vector(int n) {
        std::vector<double> v(n);
        for (auto& x : v) x = gaussian();
        return v;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace polymax
