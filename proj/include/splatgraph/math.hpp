#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <cstdint>
#include <vector>

namespace splatgraph {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

inline Mat3 skew(const Vec3& v) {
    Mat3 m;
    m <<     0, -v.z(),  v.y(),
         v.z(),      0, -v.x(),
        -v.y(),  v.x(),      0;
    return m;
}

// Quaternion exponential of a rotation vector. Stable near zero.
inline Quat quat_exp(const Vec3& w) {
    const double theta2 = w.squaredNorm();
    const double theta = std::sqrt(theta2);
    double re, im;  // cos(theta/2), sin(theta/2)/theta
    if (theta < 1e-8) {
        re = 1.0 - theta2 / 8.0;
        im = 0.5 - theta2 / 48.0;
    } else {
        re = std::cos(0.5 * theta);
        im = std::sin(0.5 * theta) / theta;
    }
    return Quat(re, im * w.x(), im * w.y(), im * w.z());
}

// Rotation vector of a unit quaternion (inverse of quat_exp).
inline Vec3 quat_log(const Quat& q_in) {
    Quat q = q_in;
    if (q.w() < 0) q.coeffs() = -q.coeffs();  // principal branch
    const Vec3 v(q.x(), q.y(), q.z());
    const double n = v.norm();
    if (n < 1e-12) return 2.0 * v;
    const double angle = 2.0 * std::atan2(n, q.w());
    return (angle / n) * v;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// The 26 unit directions toward the faces, edges and corners of a cube,
// in lexicographic (x, y, z) component order. Shared probe grid for view
// initialization and brute-force view search, so results stay comparable.
inline std::vector<Vec3> cube_directions() {
    std::vector<Vec3> dirs;
    dirs.reserve(26);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                dirs.push_back(Vec3(i, j, k).normalized());
            }
    return dirs;
}

// Deterministic counter-based RNG (splitmix64). All stochastic behaviour in
// the library routes through this so that a run is reproducible from one seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    double normal() {
        // Box-Muller; one value per call keeps the stream layout simple.
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Vec3 unit_vector() {
        // Marsaglia rejection on the disk.
        for (;;) {
            const double a = uniform(-1.0, 1.0);
            const double b = uniform(-1.0, 1.0);
            const double s = a * a + b * b;
            if (s >= 1.0 || s == 0.0) continue;
            const double r = 2.0 * std::sqrt(1.0 - s);
            return Vec3(a * r, b * r, 1.0 - 2.0 * s);
        }
    }

    // Derive an independent stream; used to decouple per-object randomness
    // from iteration order.
    Rng fork(std::uint64_t salt) {
        std::uint64_t s = state_ ^ (0xd1342543de82ef95ULL * (salt + 1));
        s = (s ^ (s >> 33)) * 0xff51afd7ed558ccdULL;
        return Rng(s ^ (s >> 33));
    }

private:
    std::uint64_t state_;
};

}  // namespace splatgraph
