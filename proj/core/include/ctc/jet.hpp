#pragma once

#include <array>
#include <cmath>

namespace ctc {

/// Truncated Taylor series of a scalar signal t -> f(t), expanded at t = 0.
/// Coefficient k stores f^(k)(0)/k!, retained through order 4 — enough to
/// carry a value and its first four time derivatives through compositions
/// of smooth maps (forward-mode differentiation).
struct Jet {
    static constexpr int kOrder = 4;
    static constexpr int kCoeffs = kOrder + 1;

    std::array<double, kCoeffs> c{};

    Jet() = default;
    explicit Jet(double value) { c[0] = value; }

    /// Series of the identity signal t -> value + t (derivative one).
    static Jet variable(double value) {
        Jet j(value);
        j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }

    /// k-th derivative, k! * c[k].
    double derivative(int k) const {
        static constexpr double kFact[kCoeffs] = {1.0, 1.0, 2.0, 6.0, 24.0};
        return kFact[k] * c[k];
    }

    Jet& operator+=(const Jet& o) {
        for (int i = 0; i < kCoeffs; ++i) c[i] += o.c[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int i = 0; i < kCoeffs; ++i) c[i] -= o.c[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& v : c) v *= s;
        return *this;
    }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(const Jet& a) {
    Jet r;
    for (int i = 0; i < Jet::kCoeffs; ++i) r.c[i] = -a.c[i];
    return r;
}
inline Jet operator+(Jet a, double b) { a.c[0] += b; return a; }
inline Jet operator+(double a, Jet b) { b.c[0] += a; return b; }
inline Jet operator-(Jet a, double b) { a.c[0] -= b; return a; }
inline Jet operator-(double a, const Jet& b) { return -b + a; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k < Jet::kCoeffs; ++k) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) acc += a.c[i] * b.c[k - i];
        r.c[k] = acc;
    }
    return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    q.c[0] = a.c[0] / b.c[0];
    for (int k = 1; k < Jet::kCoeffs; ++k) {
        double acc = a.c[k];
        for (int i = 0; i < k; ++i) acc -= q.c[i] * b.c[k - i];
        q.c[k] = acc / b.c[0];
    }
    return q;
}
inline Jet operator/(double a, const Jet& b) { return Jet(a) / b; }
inline Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

inline Jet sqrt(const Jet& a) {
    Jet y;
    y.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k < Jet::kCoeffs; ++k) {
        double acc = a.c[k];
        for (int i = 1; i < k; ++i) acc -= y.c[i] * y.c[k - i];
        y.c[k] = acc / (2.0 * y.c[0]);
    }
    return y;
}

/// sin and cos share the coupled recurrence s' = c x', c' = -s x'.
inline void sin_cos(const Jet& x, Jet& s, Jet& c) {
    s.c[0] = std::sin(x.c[0]);
    c.c[0] = std::cos(x.c[0]);
    for (int k = 1; k < Jet::kCoeffs; ++k) {
        double as = 0.0;
        double ac = 0.0;
        for (int i = 0; i < k; ++i) {
            const double dx = static_cast<double>(k - i) * x.c[k - i];
            as += c.c[i] * dx;
            ac -= s.c[i] * dx;
        }
        s.c[k] = as / k;
        c.c[k] = ac / k;
    }
}

inline Jet sin(const Jet& x) {
    Jet s, c;
    sin_cos(x, s, c);
    return s;
}

inline Jet cos(const Jet& x) {
    Jet s, c;
    sin_cos(x, s, c);
    return c;
}

/// y = tanh(x) via y' = (1 - y^2) x'.
inline Jet tanh(const Jet& x) {
    Jet y, w;  // w = 1 - y^2
    y.c[0] = std::tanh(x.c[0]);
    w.c[0] = 1.0 - y.c[0] * y.c[0];
    for (int k = 1; k < Jet::kCoeffs; ++k) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i) acc += w.c[i] * static_cast<double>(k - i) * x.c[k - i];
        y.c[k] = acc / k;
        double wk = 0.0;
        for (int i = 0; i <= k; ++i) wk -= y.c[i] * y.c[k - i];
        w.c[k] = wk;
    }
    return y;
}

/// theta = atan2(y, x) along the signal; theta' = (x y' - y x')/(x^2 + y^2).
/// The branch only shifts the constant term, so derivatives are exact on
/// every branch.
inline Jet atan2(const Jet& y, const Jet& x) {
    // Numerator/denominator of theta' as series (order 3 suffices: the
    // top coefficient of theta comes from integrating order 3 of theta').
    Jet xd, yd;
    for (int k = 0; k + 1 < Jet::kCoeffs; ++k) {
        xd.c[k] = static_cast<double>(k + 1) * x.c[k + 1];
        yd.c[k] = static_cast<double>(k + 1) * y.c[k + 1];
    }
    const Jet w = (x * yd - y * xd) / (x * x + y * y);
    Jet th;
    th.c[0] = std::atan2(y.c[0], x.c[0]);
    for (int k = 1; k < Jet::kCoeffs; ++k) th.c[k] = w.c[k - 1] / k;
    return th;
}

/// 3-vector of jets; the handful of operations the frame algebra needs.
struct JetVec3 {
    Jet x, y, z;

    JetVec3() = default;
    JetVec3(const Jet& x_, const Jet& y_, const Jet& z_) : x(x_), y(y_), z(z_) {}
};

inline JetVec3 operator+(const JetVec3& a, const JetVec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline JetVec3 operator-(const JetVec3& a, const JetVec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline JetVec3 operator*(const JetVec3& a, const Jet& s) {
    return {a.x * s, a.y * s, a.z * s};
}
inline JetVec3 operator*(const Jet& s, const JetVec3& a) { return a * s; }
inline JetVec3 operator*(const JetVec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }

inline Jet dot(const JetVec3& a, const JetVec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline JetVec3 cross(const JetVec3& a, const JetVec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

}  // namespace ctc
