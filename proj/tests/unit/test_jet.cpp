#include <doctest.h>

#include <cmath>

#include "ctc/jet.hpp"
#include "helpers.hpp"

using ctc::Jet;

namespace {

/// Evaluate the scalar function behind a jet-built expression at t, for
/// finite-difference cross-checks of the propagated derivatives.
template <class F>
double nth_derivative(F&& f, double t, int order, double h) {
    // Central stencils up to order 4.
    switch (order) {
        case 0:
            return f(t);
        case 1:
            return (f(t + h) - f(t - h)) / (2 * h);
        case 2:
            return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
        case 3:
            return (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) /
                   (2 * h * h * h);
        case 4:
            return (f(t + 2 * h) - 4 * f(t + h) + 6 * f(t) - 4 * f(t - h) + f(t - 2 * h)) /
                   (h * h * h * h);
    }
    return 0.0;
}

}  // namespace

TEST_CASE("jet arithmetic matches finite differences of the composed map") {
    // x(t) = 0.4 + 0.3 t - 0.2 t^2 + 0.05 t^3, y(t) = -0.1 + 0.7 t + 0.1 t^2
    const auto xf = [](double t) { return 0.4 + 0.3 * t - 0.2 * t * t + 0.05 * t * t * t; };
    const auto yf = [](double t) { return -0.1 + 0.7 * t + 0.1 * t * t; };
    Jet x, y;
    x.c = {0.4, 0.3, -0.2, 0.05, 0.0};
    y.c = {-0.1, 0.7, 0.1, 0.0, 0.0};

    // The high-order stencils are the noisy side of this comparison; their
    // truncation error dominates the tolerance for k = 3, 4.
    const auto check = [&](const Jet& j, auto&& scalar) {
        for (int k = 0; k <= 4; ++k) {
            const double fd = nth_derivative(scalar, 0.0, k, k <= 1 ? 1e-5 : (k == 2 ? 1e-4 : 1e-3));
            const double tol = k <= 2 ? 1e-6 : 0.03;
            CHECK(j.derivative(k) == doctest::Approx(fd).epsilon(tol).scale(1.0));
        }
    };

    check(x * y, [&](double t) { return xf(t) * yf(t); });
    check(x / (y + 2.0), [&](double t) { return xf(t) / (yf(t) + 2.0); });
    check(sqrt(x + 1.0), [&](double t) { return std::sqrt(xf(t) + 1.0); });
    check(sin(x), [&](double t) { return std::sin(xf(t)); });
    check(cos(y), [&](double t) { return std::cos(yf(t)); });
    check(tanh(x), [&](double t) { return std::tanh(xf(t)); });
    check(atan2(y, x), [&](double t) { return std::atan2(yf(t), xf(t)); });
}

TEST_CASE("jet atan2 derivatives are branch independent") {
    Jet x, y;
    x.c = {-0.8, 0.2, 0.1, 0.0, 0.0};  // second quadrant, negative x
    y.c = {0.3, -0.5, 0.0, 0.2, 0.0};
    const Jet th = atan2(y, x);
    const auto f = [&](double t) {
        const double xv = -0.8 + 0.2 * t + 0.1 * t * t;
        const double yv = 0.3 - 0.5 * t + 0.2 * t * t * t;
        return std::atan2(yv, xv);
    };
    for (int k = 1; k <= 3; ++k) {
        const double fd = nth_derivative(f, 0.0, k, k <= 1 ? 1e-5 : (k == 2 ? 1e-4 : 1e-3));
        const double tol = k <= 2 ? 1e-5 : 0.03;
        CHECK(th.derivative(k) == doctest::Approx(fd).epsilon(tol).scale(1.0));
    }
}

TEST_CASE("jet identity variable carries exactly one derivative") {
    const Jet t = Jet::variable(2.5);
    CHECK(t.value() == 2.5);
    CHECK(t.derivative(1) == 1.0);
    CHECK(t.derivative(2) == 0.0);

    const Jet p = t * t * t;  // t^3: derivatives 3t^2, 6t, 6, 0
    CHECK(p.value() == doctest::Approx(15.625));
    CHECK(p.derivative(1) == doctest::Approx(18.75));
    CHECK(p.derivative(2) == doctest::Approx(15.0));
    CHECK(p.derivative(3) == doctest::Approx(6.0));
    CHECK(p.derivative(4) == doctest::Approx(0.0));
}
