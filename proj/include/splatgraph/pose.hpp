#pragma once

#include "splatgraph/math.hpp"

namespace splatgraph {

// Rigid transform as unit quaternion plus translation. Composition and action
// follow the usual convention: act(p) = R p + t.
struct Pose {
    Quat q{1, 0, 0, 0};
    Vec3 t{0, 0, 0};

    static Pose identity() { return Pose{}; }

    Vec3 act(const Vec3& p) const { return q * p + t; }

    // this ∘ other: apply `other` first, then this.
    Pose compose(const Pose& other) const {
        Pose out;
        out.q = (q * other.q).normalized();
        out.t = q * other.t + t;
        return out;
    }

    Pose inverse() const {
        Pose out;
        out.q = q.conjugate();
        out.t = -(out.q * t);
        return out;
    }

    Mat3 rotation() const { return q.toRotationMatrix(); }

    // Left-multiplied local increment: eps = (w, u) maps to
    // delta = (exp(w), u) and the result is delta ∘ this.
    // This is the retraction the view optimizer and its finite-difference
    // checks share; both sides must use exactly this map.
    Pose boxplus_left(const Vec6& eps) const {
        const Vec3 w = eps.head<3>();
        const Vec3 u = eps.tail<3>();
        Pose delta;
        delta.q = quat_exp(w);
        delta.t = u;
        return delta.compose(*this);
    }

    bool approx_equal(const Pose& other, double tol) const {
        const double dq = std::min((q.coeffs() - other.q.coeffs()).norm(),
                                   (q.coeffs() + other.q.coeffs()).norm());
        return dq <= tol && (t - other.t).norm() <= tol;
    }
};

}  // namespace splatgraph
