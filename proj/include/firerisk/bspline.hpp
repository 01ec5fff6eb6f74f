#pragma once

#include "firerisk/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace firerisk {

// Open (clamped) knot vector: boundary knots repeated degree+1 times, interior knots
// equally spaced. basis_dim functions of the given degree span [a, b].
inline std::vector<double> clamped_knots(double a, double b, int basis_dim, int degree = 3) {
    if (!(b > a)) throw DataError("clamped_knots: need b > a");
    if (basis_dim < degree + 1)
        throw DataError("clamped_knots: basis_dim must be at least degree + 1");
    int interior = basis_dim - degree - 1;
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(basis_dim + degree + 1));
    for (int i = 0; i <= degree; ++i) t.push_back(a);
    for (int i = 1; i <= interior; ++i)
        t.push_back(a + (b - a) * static_cast<double>(i) / (interior + 1));
    for (int i = 0; i <= degree; ++i) t.push_back(b);
    return t;
}

namespace detail {

inline int find_span(const std::vector<double>& knots, int basis_dim, int degree, double x) {
    // right boundary belongs to the last non-empty span
    if (x >= knots[static_cast<std::size_t>(basis_dim)]) return basis_dim - 1;
    if (x <= knots[static_cast<std::size_t>(degree)]) return degree;
    int lo = degree, hi = basis_dim;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (x < knots[static_cast<std::size_t>(mid)])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

} // namespace detail

// Cox-de Boor evaluation of all basis functions at x. Throws when x falls outside the
// boundary knots; callers clamp or extend knots as appropriate for their context.
inline Eigen::RowVectorXd bspline_row(const std::vector<double>& knots, int degree, double x) {
    int basis_dim = static_cast<int>(knots.size()) - degree - 1;
    double a = knots[static_cast<std::size_t>(degree)];
    double b = knots[static_cast<std::size_t>(basis_dim)];
    double tol = 1e-12 * std::max(1.0, std::fabs(b - a));
    if (x < a - tol || x > b + tol)
        throw DataError("bspline_row: x = " + format_double(x) + " outside basis range [" +
                        format_double(a) + ", " + format_double(b) + "]");
    x = std::clamp(x, a, b);

    int span = detail::find_span(knots, basis_dim, degree, x);
    std::vector<double> N(static_cast<std::size_t>(degree) + 1, 0.0);
    std::vector<double> left(static_cast<std::size_t>(degree) + 1, 0.0);
    std::vector<double> right(static_cast<std::size_t>(degree) + 1, 0.0);
    N[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[static_cast<std::size_t>(j)] = x - knots[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            double temp = denom != 0.0 ? N[static_cast<std::size_t>(r)] / denom : 0.0;
            N[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        N[static_cast<std::size_t>(j)] = saved;
    }

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(basis_dim);
    for (int r = 0; r <= degree; ++r) row(span - degree + r) = N[static_cast<std::size_t>(r)];
    return row;
}

inline Eigen::MatrixXd bspline_basis(const std::vector<double>& x,
                                     const std::vector<double>& knots, int degree = 3) {
    int basis_dim = static_cast<int>(knots.size()) - degree - 1;
    Eigen::MatrixXd B(static_cast<Eigen::Index>(x.size()), basis_dim);
    for (std::size_t i = 0; i < x.size(); ++i) B.row(static_cast<Eigen::Index>(i)) = bspline_row(knots, degree, x[i]);
    return B;
}

// Second-difference coefficient penalty D'D (P-spline roughness penalty).
inline Eigen::MatrixXd second_difference_penalty(int basis_dim) {
    if (basis_dim < 3) throw DataError("second_difference_penalty: basis_dim must be >= 3");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(basis_dim - 2, basis_dim);
    for (int i = 0; i < basis_dim - 2; ++i) {
        D(i, i) = 1.0;
        D(i, i + 1) = -2.0;
        D(i, i + 2) = 1.0;
    }
    return D.transpose() * D;
}

} // namespace firerisk
