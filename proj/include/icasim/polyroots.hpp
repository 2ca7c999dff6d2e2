#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace icasim::poly {

/// Real roots of a x^2 + b x + c = 0 (may degrade to linear).
inline void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
    if (a == 0.0) {
        if (b != 0.0) out.push_back(-c / b);
        return;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    // Citardauq form for the root that would cancel.
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    out.push_back(q / a);
    if (q != 0.0) out.push_back(c / q);
    else out.push_back(0.0);
}

/// Real roots of x^3 + a x^2 + b x + c = 0 (monic), via the trigonometric /
/// Cardano split on the depressed cubic.
inline void cubic_roots_monic(double a, double b, double c, std::vector<double>& out) {
    const double shift = a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        out.push_back(u + v - shift);
    } else if (p == 0.0 && q == 0.0) {
        out.push_back(-shift);
    } else {
        const double r = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
        const double m = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k)
            out.push_back(m * std::cos((phi + 2.0 * std::numbers::pi * k) / 3.0) - shift);
    }
}

/// Real roots of a4 x^4 + a3 x^3 + a2 x^2 + a1 x + a0 = 0, Ferrari's method
/// with Newton polish. Degenerate leading coefficients fall through to the
/// lower-degree solvers.
inline std::vector<double> quartic_roots(double a4, double a3, double a2, double a1, double a0) {
    std::vector<double> out;
    const double scale =
        std::max({std::abs(a4), std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
    if (scale == 0.0) return out;
    const double eps = 1e-14 * scale;
    if (std::abs(a4) <= eps) {
        if (std::abs(a3) <= eps) {
            quadratic_roots(a2, a1, a0, out);
        } else {
            cubic_roots_monic(a2 / a3, a1 / a3, a0 / a3, out);
        }
    } else {
        const double p = a3 / a4, q = a2 / a4, r = a1 / a4, s = a0 / a4;
        // depress: x = y - p/4
        const double p2 = p * p;
        const double A = q - 3.0 * p2 / 8.0;
        const double B = r - p * q / 2.0 + p2 * p / 8.0;
        const double C = s - p * r / 4.0 + p2 * q / 16.0 - 3.0 * p2 * p2 / 256.0;
        std::vector<double> ys;
        if (std::abs(B) <= 1e-14 * std::max(1.0, std::abs(A) + std::abs(C))) {
            // biquadratic
            std::vector<double> zs;
            quadratic_roots(1.0, A, C, zs);
            for (double z : zs)
                if (z >= 0.0) {
                    ys.push_back(std::sqrt(z));
                    ys.push_back(-std::sqrt(z));
                }
        } else {
            // Ferrari: find z with 8 z^3 + 8 A z^2 + (2 A^2 - 8 C) z - B^2 = 0;
            // a nonnegative real root always exists.
            std::vector<double> zs;
            cubic_roots_monic(A, (2.0 * A * A - 8.0 * C) / 8.0, -B * B / 8.0, zs);
            double z = -1.0;
            for (double cand : zs)
                if (cand > z) z = cand;
            if (z > 0.0) {
                const double w = std::sqrt(2.0 * z);
                const double t1 = A / 2.0 + z - B / (2.0 * w);
                const double t2 = A / 2.0 + z + B / (2.0 * w);
                quadratic_roots(1.0, w, t1, ys);
                quadratic_roots(1.0, -w, t2, ys);
            }
        }
        for (double y : ys) out.push_back(y - p / 4.0);
    }
    // Newton polish on the original quartic.
    for (double& x : out) {
        for (int it = 0; it < 3; ++it) {
            const double f = (((a4 * x + a3) * x + a2) * x + a1) * x + a0;
            const double df = ((4.0 * a4 * x + 3.0 * a3) * x + 2.0 * a2) * x + a1;
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step)) break;
            x -= step;
        }
    }
    return out;
}

}  // namespace icasim::poly
