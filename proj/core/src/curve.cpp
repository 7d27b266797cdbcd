#include "ctc/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctc/errors.hpp"

namespace ctc {

namespace {

constexpr double kPi = 3.14159265358979323846;

class LineCurve final : public Curve {
public:
    LineCurve(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
              double half_length)
        : origin_(origin), dir_(direction.normalized()), name_("line") {
        range_ = {-half_length, half_length, false};
    }

    void eval_jets(const Jet& s, JetVec3& eta, JetVec3& d_eta, JetVec3& dd_eta) const override {
        eta = {Jet(origin_.x()) + s * dir_.x(), Jet(origin_.y()) + s * dir_.y(),
               Jet(origin_.z()) + s * dir_.z()};
        d_eta = {Jet(dir_.x()), Jet(dir_.y()), Jet(dir_.z())};
        dd_eta = {Jet(0.0), Jet(0.0), Jet(0.0)};
    }

    SRange s_range() const override { return range_; }
    const std::string& name() const override { return name_; }

private:
    Eigen::Vector3d origin_;
    Eigen::Vector3d dir_;
    SRange range_;
    std::string name_;
};

class CircleCurve final : public Curve {
public:
    explicit CircleCurve(double radius) : r_(radius), name_("circle") {
        range_ = {0.0, 2.0 * kPi * r_, true};
    }

    void eval_jets(const Jet& s, JetVec3& eta, JetVec3& d_eta, JetVec3& dd_eta) const override {
        const Jet u = s / r_;
        Jet su, cu;
        sin_cos(u, su, cu);
        eta = {cu * r_, su * r_, Jet(0.0)};
        d_eta = {-su, cu, Jet(0.0)};
        dd_eta = {cu * (-1.0 / r_), su * (-1.0 / r_), Jet(0.0)};
    }

    SRange s_range() const override { return range_; }
    const std::string& name() const override { return name_; }

private:
    double r_;
    SRange range_;
    std::string name_;
};

class HelixCurve final : public Curve {
public:
    HelixCurve(double radius, double pitch, double s_min, double s_max)
        : r_(radius), climb_(pitch / (2.0 * kPi)), name_("helix") {
        wavelength_ = std::sqrt(r_ * r_ + climb_ * climb_);
        range_ = {s_min, s_max, false};
    }

    void eval_jets(const Jet& s, JetVec3& eta, JetVec3& d_eta, JetVec3& dd_eta) const override {
        const double w = 1.0 / wavelength_;
        const Jet u = s * w;
        Jet su, cu;
        sin_cos(u, su, cu);
        eta = {cu * r_, su * r_, u * climb_};
        d_eta = {-su * (r_ * w), cu * (r_ * w), Jet(climb_ * w)};
        dd_eta = {cu * (-r_ * w * w), su * (-r_ * w * w), Jet(0.0)};
    }

    SRange s_range() const override { return range_; }
    const std::string& name() const override { return name_; }

    double turn_length() const { return 2.0 * kPi * wavelength_; }

private:
    double r_;
    double climb_;  // rise per unit angle
    double wavelength_;
    SRange range_;
    std::string name_;
};

double wrap_into_range(const SRange& r, double s) {
    if (!r.periodic) return s;
    const double len = r.length();
    double x = std::fmod(s - r.min, len);
    if (x < 0.0) x += len;
    return r.min + x;
}

struct Stationarity {
    double g;       // (P - eta) . eta'
    double gprime;  // -|eta'|^2 + (P - eta) . eta''
    double dist2;
};

Stationarity stationarity(const Curve& curve, const Eigen::Vector3d& p, double s) {
    const CurveSample c = curve.at(s);
    const Eigen::Vector3d rho = p - c.p;
    return {rho.dot(c.d1), -c.d1.squaredNorm() + rho.dot(c.d2), rho.squaredNorm()};
}

}  // namespace

CurveSample Curve::at(double s) const {
    JetVec3 eta, d1, d2;
    eval_jets(Jet::variable(s), eta, d1, d2);
    CurveSample c;
    c.p = {eta.x.value(), eta.y.value(), eta.z.value()};
    c.d1 = {eta.x.derivative(1), eta.y.derivative(1), eta.z.derivative(1)};
    c.d2 = {eta.x.derivative(2), eta.y.derivative(2), eta.z.derivative(2)};
    c.d3 = {eta.x.derivative(3), eta.y.derivative(3), eta.z.derivative(3)};
    return c;
}

std::shared_ptr<Curve> make_line(const Eigen::Vector3d& origin,
                                 const Eigen::Vector3d& direction, double half_length) {
    if (direction.norm() == 0.0) {
        throw std::invalid_argument("make_line: direction must be nonzero");
    }
    if (!(half_length > 0.0)) {
        throw std::invalid_argument("make_line: half_length must be positive");
    }
    return std::make_shared<LineCurve>(origin, direction, half_length);
}

std::shared_ptr<Curve> make_circle(double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("make_circle: radius must be positive");
    }
    return std::make_shared<CircleCurve>(radius);
}

std::shared_ptr<Curve> make_helix(double radius, double pitch_per_turn,
                                  std::optional<double> s_min, std::optional<double> s_max) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("make_helix: radius must be positive");
    }
    const double climb = pitch_per_turn / (2.0 * kPi);
    const double turn = 2.0 * kPi * std::sqrt(radius * radius + climb * climb);
    const double lo = s_min.value_or(-turn);
    const double hi = s_max.value_or(4.0 * turn);
    if (!(hi > lo)) {
        throw std::invalid_argument("make_helix: s_max must exceed s_min");
    }
    return std::make_shared<HelixCurve>(radius, pitch_per_turn, lo, hi);
}

double wrap_angle(double a) {
    double x = std::remainder(a, 2.0 * kPi);
    if (x <= -kPi) x += 2.0 * kPi;  // remainder returns [-pi, pi]; want (-pi, pi]
    return x;
}

CurveFrame frame_at(const Curve& curve, double s, std::optional<double> fixed_alpha) {
    const CurveSample c = curve.at(s);
    CurveFrame f;
    f.s = s;
    f.point = c.p;
    const double n = c.d1.norm();
    f.tangent = c.d1 / n;

    const double hx = c.d1.x(), hy = c.d1.y(), hz = c.d1.z();
    const double h2 = hx * hx + hy * hy;
    const double h = std::sqrt(h2);

    f.beta = std::atan2(hz, h);
    if (h < kVerticalTangentTol * n) {
        f.vertical = true;
        f.alpha = fixed_alpha.value_or(0.0);
        f.epsilon = 0.0;
        f.alpha_prime = 0.0;
        f.beta_prime = 0.0;
        f.epsilon_prime = 0.0;
        return f;
    }

    f.alpha = std::atan2(hy, hx);
    f.epsilon = (hx * c.d2.y() - hy * c.d2.x()) / h2;
    f.alpha_prime = f.epsilon;

    const double hprime = (hx * c.d2.x() + hy * c.d2.y()) / h;
    f.beta_prime = (c.d2.z() * h - hz * hprime) / (h2 + hz * hz);

    const double num = hx * c.d2.y() - hy * c.d2.x();
    const double num_prime = hx * c.d3.y() - hy * c.d3.x();
    const double h2_prime = 2.0 * (hx * c.d2.x() + hy * c.d2.y());
    f.epsilon_prime = (num_prime * h2 - num * h2_prime) / (h2 * h2);
    return f;
}

ProjectionResult project_closest(const Curve& curve, const Eigen::Vector3d& p,
                                 std::optional<double> s_hint, const ProjectionOptions& opts) {
    const SRange range = curve.s_range();
    double s;
    if (s_hint) {
        s = *s_hint;
    } else {
        // Coarse scan for a seed plus ambiguity detection.
        const int n = std::max(8, opts.grid_samples);
        const double len = range.length();
        const double step = range.periodic ? len / n : len / (n - 1);
        std::vector<double> f(n);
        double fmin = std::numeric_limits<double>::infinity();
        double fmax = -fmin;
        int imin = 0;
        for (int i = 0; i < n; ++i) {
            const double si = range.min + i * step;
            f[i] = (p - curve.at(si).p).squaredNorm();
            if (f[i] < fmin) {
                fmin = f[i];
                imin = i;
            }
            fmax = std::max(fmax, f[i]);
        }
        // Local minima close enough to the global best and not adjacent to
        // it mean the query has no unique answer.
        const double tie = fmin + std::max(1e-8 * (1.0 + fmin), 1e-12 * (fmax - fmin));
        std::vector<double> candidates;
        for (int i = 0; i < n; ++i) {
            const int prev = (i == 0) ? (range.periodic ? n - 1 : 0) : i - 1;
            const int next = (i == n - 1) ? (range.periodic ? 0 : n - 1) : i + 1;
            if (f[i] <= f[prev] && f[i] <= f[next] && f[i] <= tie) {
                candidates.push_back(range.min + i * step);
            }
        }
        if (candidates.size() > 1) {
            // Keep only candidates separated by more than two grid cells.
            std::vector<double> separated;
            for (double c : candidates) {
                bool close = false;
                for (double o : separated) {
                    double d = std::abs(c - o);
                    if (range.periodic) d = std::min(d, len - d);
                    if (d <= 2.0 * step) close = true;
                }
                if (!close) separated.push_back(c);
            }
            if (separated.size() > 1) {
                throw ProjectionAmbiguousError(
                    "project_closest: no unique closest point on '" + curve.name() + "'",
                    separated);
            }
        }
        s = range.min + imin * step;
    }

    // Damped Newton on g(s) = (P - eta) . eta' = 0.
    ProjectionResult out;
    Stationarity st = stationarity(curve, p, s);
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it + 1;
        if (st.gprime == 0.0) break;
        double step = -st.g / st.gprime;
        double s_next = s + step;
        Stationarity st_next = stationarity(curve, p, s_next);
        int halvings = 0;
        while (std::abs(st_next.g) > std::abs(st.g) && halvings < 20) {
            step *= 0.5;
            s_next = s + step;
            st_next = stationarity(curve, p, s_next);
            ++halvings;
        }
        s = s_next;
        st = st_next;
        last_step = std::abs(step);
        if (std::abs(st.g) < opts.g_tol && last_step < opts.step_tol) break;
    }
    if (!range.periodic) s = std::clamp(s, range.min, range.max);
    st = stationarity(curve, p, s);
    // Hint-seeded queries keep the continuous branch of s (it may run past
    // one period while lapping a closed curve); fresh queries report the
    // principal value.
    out.s_star = s_hint ? s : wrap_into_range(range, s);
    out.distance = std::sqrt(st.dist2);
    out.converged = std::abs(st.g) < opts.g_tol && last_step < opts.step_tol;
    return out;
}

DeviationState deviations(const Curve& curve, const Eigen::Vector3d& p, double phi,
                          double theta, double psi, std::optional<double> s_hint,
                          std::optional<double> fixed_alpha) {
    const ProjectionResult pr = project_closest(curve, p, s_hint);
    const CurveFrame f = frame_at(curve, pr.s_star, fixed_alpha);
    if (f.vertical && !fixed_alpha) {
        throw FrameDegenerateError(
            "deviations: vertical tangent needs a yaw-reference override", pr.s_star);
    }
    const double ca = std::cos(f.alpha), sa = std::sin(f.alpha);
    const double cb = std::cos(f.beta), sb = std::sin(f.beta);
    const Eigen::Vector3d rho = p - f.point;
    // Rows of Ry(beta)^T Rz(alpha)^T; the first is the tangential residual.
    const Eigen::Vector3d a2(-sa, ca, 0.0);
    const Eigen::Vector3d a3(-ca * sb, -sa * sb, cb);
    DeviationState d;
    d.s = pr.s_star;
    d.e1 = a2.dot(rho);
    d.e2 = a3.dot(rho);
    d.delta_phi = wrap_angle(phi - f.alpha);
    d.delta_theta = theta;
    d.delta_psi = psi;
    return d;
}

PathTracker::PathTracker(std::shared_ptr<const Curve> curve,
                         std::optional<double> alpha_override, ProjectionOptions opts)
    : curve_(std::move(curve)), alpha_override_(alpha_override), opts_(opts) {}

ProjectionResult PathTracker::project(const Eigen::Vector3d& p) {
    last_projection_ = project_closest(*curve_, p, hint_, opts_);
    hint_ = last_projection_.s_star;
    return last_projection_;
}

CurveFrame PathTracker::frame(double s) {
    CurveFrame f = frame_at(*curve_, s, alpha_override_);
    if (f.vertical) {
        if (alpha_override_) {
            f.alpha = *alpha_override_;
        } else if (held_alpha_) {
            f.alpha = *held_alpha_;
        } else {
            throw FrameDegenerateError(
                "PathTracker: vertical tangent before any well-defined alpha and "
                "no override configured",
                s);
        }
    } else {
        if (alpha_anchor_) {
            // Continuous branch: shift by whole turns toward the anchor.
            const double turns = std::round((*alpha_anchor_ - f.alpha) / (2.0 * kPi));
            f.alpha += 2.0 * kPi * turns;
        }
        alpha_anchor_ = f.alpha;
        held_alpha_ = f.alpha;
    }
    return f;
}

DeviationState PathTracker::deviations(const Eigen::Vector3d& p, double phi, double theta,
                                       double psi) {
    const ProjectionResult pr = project(p);
    const CurveFrame f = frame(pr.s_star);
    const double ca = std::cos(f.alpha), sa = std::sin(f.alpha);
    const double cb = std::cos(f.beta), sb = std::sin(f.beta);
    const Eigen::Vector3d rho = p - f.point;
    const Eigen::Vector3d a2(-sa, ca, 0.0);
    const Eigen::Vector3d a3(-ca * sb, -sa * sb, cb);
    DeviationState d;
    d.s = pr.s_star;
    d.e1 = a2.dot(rho);
    d.e2 = a3.dot(rho);
    d.delta_phi = wrap_angle(phi - f.alpha);
    d.delta_theta = theta;
    d.delta_psi = psi;
    return d;
}

}  // namespace ctc
