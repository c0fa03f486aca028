#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dogfight {

inline constexpr double kGravity = 9.8;
inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

enum class Side : std::uint8_t { Blue = 0, Red = 1 };

constexpr Side opponent_of(Side s) { return s == Side::Blue ? Side::Red : Side::Blue; }
constexpr std::string_view to_string(Side s) { return s == Side::Blue ? "blue" : "red"; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

// Errors. Everything derives from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, arguments or scenario bounds. Maps to CLI exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A state where the equations of motion divide by ~zero.
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

/// Deterministic random stream. Copying an Rng forks the stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    double uniform(double lo, double hi) {
        if (lo == hi) return lo;
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal() { return normal_(engine_); }
    std::uint64_t next_u64() { return engine_(); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(base) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

}  // namespace dogfight
