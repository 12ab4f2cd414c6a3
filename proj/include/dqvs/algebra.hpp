#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dqvs {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Quaternion eta + mu1*i + mu2*j + mu3*k with Hamilton's product.
class Quaternion {
 public:
  Quaternion() : eta_(0.0), mu_(Vec3::Zero()) {}
  Quaternion(double eta, const Vec3& mu) : eta_(eta), mu_(mu) {}
  Quaternion(double eta, double mu1, double mu2, double mu3)
      : eta_(eta), mu_(mu1, mu2, mu3) {}

  static Quaternion identity() { return {1.0, Vec3::Zero()}; }
  static Quaternion pure(const Vec3& v) { return {0.0, v}; }

  double eta() const { return eta_; }
  const Vec3& mu() const { return mu_; }

  Quaternion conjugate() const { return {eta_, -mu_}; }
  double squared_norm() const { return eta_ * eta_ + mu_.squaredNorm(); }
  double norm() const { return std::sqrt(squared_norm()); }

  Quaternion operator+(const Quaternion& o) const {
    return {eta_ + o.eta_, mu_ + o.mu_};
  }
  Quaternion operator-(const Quaternion& o) const {
    return {eta_ - o.eta_, mu_ - o.mu_};
  }
  Quaternion operator-() const { return {-eta_, -mu_}; }
  Quaternion operator*(double s) const { return {eta_ * s, mu_ * s}; }

  Quaternion operator*(const Quaternion& o) const {
    return {eta_ * o.eta_ - mu_.dot(o.mu_),
            eta_ * o.mu_ + o.eta_ * mu_ + mu_.cross(o.mu_)};
  }

 private:
  double eta_;
  Vec3 mu_;
};

inline Quaternion operator*(double s, const Quaternion& q) { return q * s; }

/// Four-component dot product (eta and mu stacked as R^4).
inline double dot4(const Quaternion& a, const Quaternion& b) {
  return a.eta() * b.eta() + a.mu().dot(b.mu());
}

namespace detail {
inline void require_pure(const Quaternion& q, const char* what) {
  if (std::abs(q.eta()) > 1e-9) {
    throw std::invalid_argument(std::string(what) +
                                ": quaternion has a nonzero real part");
  }
}
}  // namespace detail

/// Inner product of pure quaternions, -(ab+ba)/2. Equals the 3-vector dot.
inline double inner(const Quaternion& a, const Quaternion& b) {
  detail::require_pure(a, "inner");
  detail::require_pure(b, "inner");
  return a.mu().dot(b.mu());
}

/// Vector product of pure quaternions, (ab-ba)/2. Equals the 3-vector cross.
inline Quaternion cross(const Quaternion& a, const Quaternion& b) {
  detail::require_pure(a, "cross");
  detail::require_pure(b, "cross");
  return Quaternion::pure(a.mu().cross(b.mu()));
}

/// Unit-norm quaternion representing a spatial rotation. Renormalized on
/// every constructing operation.
class UnitQuaternion {
 public:
  UnitQuaternion() : q_(Quaternion::identity()) {}

  explicit UnitQuaternion(const Quaternion& q) : q_(q) {
    const double n = q_.norm();
    if (!(n > 1e-12)) {
      throw std::invalid_argument("UnitQuaternion: near-zero norm");
    }
    q_ = q_ * (1.0 / n);
  }

  /// cos(phi/2) + axis*sin(phi/2). The axis must be unit length.
  static UnitQuaternion from_axis_angle(const Vec3& axis, double phi) {
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("from_axis_angle: axis is not unit length");
    }
    UnitQuaternion r;
    r.q_ = Quaternion(std::cos(0.5 * phi), axis * std::sin(0.5 * phi));
    return r;
  }

  const Quaternion& as_quaternion() const { return q_; }
  double eta() const { return q_.eta(); }
  const Vec3& mu() const { return q_.mu(); }

  UnitQuaternion conjugate() const {
    UnitQuaternion r;
    r.q_ = q_.conjugate();
    return r;
  }

  UnitQuaternion operator*(const UnitQuaternion& o) const {
    return UnitQuaternion(q_ * o.q_);
  }

  /// Rotation angle in [0, 2*pi); principal angle of the double cover.
  double angle() const { return 2.0 * std::atan2(q_.mu().norm(), q_.eta()); }

  Vec3 rotate(const Vec3& v) const {
    const Quaternion r = q_ * Quaternion::pure(v) * q_.conjugate();
    return r.mu();
  }

 private:
  Quaternion q_;
};

/// General dual quaternion xP + eps*xD over the dual unit eps, eps^2 = 0.
class DualQuaternion {
 public:
  DualQuaternion() = default;
  DualQuaternion(const Quaternion& primary, const Quaternion& dual)
      : primary_(primary), dual_(dual) {}

  static DualQuaternion one() {
    return {Quaternion::identity(), Quaternion()};
  }

  const Quaternion& primary() const { return primary_; }
  const Quaternion& dual() const { return dual_; }

  DualQuaternion conjugate() const {
    return {primary_.conjugate(), dual_.conjugate()};
  }

  DualQuaternion operator+(const DualQuaternion& o) const {
    return {primary_ + o.primary_, dual_ + o.dual_};
  }
  DualQuaternion operator-(const DualQuaternion& o) const {
    return {primary_ - o.primary_, dual_ - o.dual_};
  }
  DualQuaternion operator*(double s) const {
    return {primary_ * s, dual_ * s};
  }

  DualQuaternion operator*(const DualQuaternion& o) const {
    return {primary_ * o.primary_,
            primary_ * o.dual_ + dual_ * o.primary_};
  }

  /// Serialization order (etaP, muP1, muP2, muP3, etaD, muD1, muD2, muD3).
  std::array<double, 8> coeffs() const {
    return {primary_.eta(), primary_.mu()[0], primary_.mu()[1],
            primary_.mu()[2], dual_.eta(),    dual_.mu()[0],
            dual_.mu()[1],    dual_.mu()[2]};
  }

 private:
  Quaternion primary_;
  Quaternion dual_;
};

/// Pure dual quaternion: a body or inertial twist (angular; linear).
/// Both real parts are structurally zero; conjugation is negation.
class Twist {
 public:
  Twist() : angular_(Vec3::Zero()), linear_(Vec3::Zero()) {}
  Twist(const Vec3& angular, const Vec3& linear)
      : angular_(angular), linear_(linear) {}

  const Vec3& angular() const { return angular_; }
  const Vec3& linear() const { return linear_; }

  Twist operator-() const { return {-angular_, -linear_}; }
  Twist conjugate() const { return -*this; }
  Twist operator+(const Twist& o) const {
    return {angular_ + o.angular_, linear_ + o.linear_};
  }
  Twist operator*(double s) const { return {angular_ * s, linear_ * s}; }

  DualQuaternion as_dual_quaternion() const {
    return {Quaternion::pure(angular_), Quaternion::pure(linear_)};
  }

 private:
  Vec3 angular_;
  Vec3 linear_;
};

/// vec6: (angular; linear). All modules share this ordering.
inline Vec6 vec6(const Twist& t) {
  Vec6 v;
  v << t.angular(), t.linear();
  return v;
}

inline Twist unvec6(const Vec6& v) {
  return {v.head<3>(), v.tail<3>()};
}

/// Unit dual quaternion representing a rigid displacement. Construction
/// renormalizes the primary part, projects the dual part onto the unit
/// condition <P,D> = 0, and canonicalizes the double-cover sign so the
/// primary real part is >= 0 (ties broken by the first nonzero imaginary
/// component).
class Pose {
 public:
  Pose() : primary_(Quaternion::identity()), dual_() {}

  static Pose from_parts(const Quaternion& primary, const Quaternion& dual) {
    Pose p;
    p.primary_ = primary;
    p.dual_ = dual;
    p.renormalize();
    p.canonicalize();
    return p;
  }

  /// x = r + eps * (1/2) t r, Eq.-style rigid displacement from a rotation
  /// and a base-frame translation.
  static Pose from_rt(const UnitQuaternion& r, const Vec3& t) {
    Pose p;
    p.primary_ = r.as_quaternion();
    p.dual_ = Quaternion::pure(t) * p.primary_ * 0.5;
    p.canonicalize();
    return p;
  }

  static Pose from_translation(const Vec3& t) {
    return from_rt(UnitQuaternion(), t);
  }

  static Pose from_rotation(const UnitQuaternion& r) {
    return from_rt(r, Vec3::Zero());
  }

  const Quaternion& primary() const { return primary_; }
  const Quaternion& dual() const { return dual_; }

  DualQuaternion as_dual_quaternion() const { return {primary_, dual_}; }

  std::array<double, 8> coeffs() const {
    return as_dual_quaternion().coeffs();
  }

  UnitQuaternion rotation() const { return UnitQuaternion(primary_); }

  /// Base-frame translation, recovered as 2 xD xP*.
  Vec3 translation() const {
    return (dual_ * primary_.conjugate()).mu() * 2.0;
  }

  /// Group inverse: the dual quaternion conjugate.
  Pose inverse() const {
    Pose p;
    p.primary_ = primary_.conjugate();
    p.dual_ = dual_.conjugate();
    p.chain_ = chain_;
    p.canonicalize();
    return p;
  }

  Pose operator*(const Pose& o) const {
    Pose p;
    p.primary_ = primary_ * o.primary_;
    p.dual_ = primary_ * o.dual_ + dual_ * o.primary_;
    p.chain_ = static_cast<std::uint8_t>(std::max(chain_, o.chain_) + 1);
    if (p.chain_ >= kRenormalizeEvery) {
      p.renormalize();
    }
    p.canonicalize();
    return p;
  }

  /// Logarithm: (phi*n/2 ; p/2) with phi, n from the primary part and p the
  /// base-frame translation.
  Twist log() const {
    const double s = primary_.mu().norm();
    Vec3 angular;
    if (s < kSmallAngleSin) {
      // sin(phi/2) ~ phi/2; mu already equals n*phi/2 to first order.
      angular = primary_.mu();
    } else {
      const double half_phi = std::atan2(s, primary_.eta());
      angular = primary_.mu() * (half_phi / s);
    }
    return {angular, 0.5 * translation()};
  }

 private:
  static constexpr std::uint8_t kRenormalizeEvery = 10;
  static constexpr double kSmallAngleSin = 1e-7;

  void renormalize() {
    const double n = primary_.norm();
    if (!(n > 1e-12)) {
      throw std::invalid_argument("Pose: primary part has near-zero norm");
    }
    primary_ = primary_ * (1.0 / n);
    dual_ = dual_ * (1.0 / n);
    dual_ = dual_ - primary_ * dot4(primary_, dual_);
    chain_ = 0;
  }

  void canonicalize() {
    double lead = primary_.eta();
    if (lead == 0.0) {
      for (int i = 0; i < 3 && lead == 0.0; ++i) {
        lead = primary_.mu()[i];
      }
    }
    if (lead < 0.0) {
      primary_ = -primary_;
      dual_ = -dual_;
    }
  }

  Quaternion primary_;
  Quaternion dual_;
  std::uint8_t chain_ = 0;
};

/// Splits a pose into its rotation and base-frame translation.
inline std::pair<UnitQuaternion, Vec3> pose_to_rt(const Pose& x) {
  return {x.rotation(), x.translation()};
}

/// Frame change of a twist: Ad(x) y = x y x*.
inline Twist adjoint(const Pose& x, const Twist& y) {
  const DualQuaternion r = x.as_dual_quaternion() * y.as_dual_quaternion() *
                           x.as_dual_quaternion().conjugate();
  return {r.primary().mu(), r.dual().mu()};
}

/// Spatial distance: R^8 Euclidean norm of 1 - a* b, with the product
/// sign-canonicalized so antipodal representatives measure zero.
inline double distance(const Pose& a, const Pose& b) {
  const Pose e = a.inverse() * b;
  const double r = 1.0 - e.primary().eta();
  return std::sqrt(r * r + e.primary().mu().squaredNorm() +
                   e.dual().eta() * e.dual().eta() +
                   e.dual().mu().squaredNorm());
}

}  // namespace dqvs
