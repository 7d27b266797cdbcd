#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace ctc::test {

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Eigen::Vector3d random_vec3(double lo, double hi) {
    return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
}

/// Central finite difference of a scalar map.
template <class F>
double central_diff(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace ctc::test
