#include <doctest.h>

#include "splatgraph/math.hpp"

using namespace splatgraph;

TEST_CASE("quat_exp of zero is identity") {
    const Quat q = quat_exp(Vec3::Zero());
    CHECK(q.w() == doctest::Approx(1.0));
    CHECK(q.vec().norm() == doctest::Approx(0.0));
}

TEST_CASE("quat_exp matches axis-angle for a quarter turn") {
    const Quat q = quat_exp(Vec3(0, 0, M_PI / 2));
    const Vec3 r = q * Vec3(1, 0, 0);
    CHECK(r.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.y() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quat_log inverts quat_exp on random rotation vectors") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Vec3 w = rng.uniform(0.0, 3.0) * rng.unit_vector();
        const Vec3 back = quat_log(quat_exp(w));
        CHECK((back - w).norm() < 1e-9);
    }
}

TEST_CASE("quat_exp is stable for tiny angles") {
    const Vec3 w(1e-12, -2e-12, 3e-13);
    const Quat q = quat_exp(w);
    CHECK(std::abs(q.norm() - 1.0) < 1e-15);
    CHECK((quat_log(q) - w).norm() < 1e-18);
}

TEST_CASE("skew matrix reproduces the cross product") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const Vec3 a = rng.unit_vector() * rng.uniform(0.1, 5.0);
        const Vec3 b = rng.unit_vector() * rng.uniform(0.1, 5.0);
        CHECK(((skew(a) * b) - a.cross(b)).norm() < 1e-12);
    }
}

TEST_CASE("rng streams are deterministic per seed") {
    Rng a(42), b(42), c(43);
    bool same = true, differ = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        same = same && va == b.next_u64();
        differ = differ || va != c.next_u64();
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("rng fork gives order-independent substreams") {
    Rng a(9);
    Rng f1 = a.fork(1);
    a.next_u64();
    a.next_u64();
    Rng f1_again = Rng(9).fork(1);
    CHECK(f1.next_u64() == f1_again.next_u64());
}

TEST_CASE("rng uniform stays in range and normal has sane moments") {
    Rng rng(5);
    double sum = 0, sum2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(2.0, 3.0);
        CHECK(u >= 2.0);
        CHECK(u < 3.0);
        const double g = rng.normal();
        sum += g;
        sum2 += g * g;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("unit vectors have unit norm") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) CHECK(std::abs(rng.unit_vector().norm() - 1.0) < 1e-12);
}
