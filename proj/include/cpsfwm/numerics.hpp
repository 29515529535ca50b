#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace cpsfwm::numerics {

using cdouble = std::complex<double>;

/// Unnormalized sinc, sin(x)/x, with the removable singularity at 0.
double sinc(double x);

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz), valid in the whole plane.
cdouble faddeeva_w(cdouble z);

/// Largest |Re z| and |Im z| accepted by erf_complex.
inline constexpr double erf_box = 25.0;

/// Complex error function. Throws std::domain_error when |Re z| or |Im z|
/// exceeds erf_box; callers in that regime should use faddeeva_w directly
/// or the saturation erf(x + iy) -> sign(x).
cdouble erf_complex(cdouble z);

/// exp(-b^2) * erf(a + i b), evaluated without forming exp(+b^2) so it stays
/// finite for arbitrarily large |b|.
cdouble scaled_erf(double a, double b);

/// Bessel function of the first kind J_l(x), x >= 0.
double bessel_j(int l, double x);

/// Modified Bessel function of the second kind K_l(x), x > 0.
double bessel_k(int l, double x);

/// m-th positive zero of J_l (m >= 1), by bracketed bisection.
double bessel_j_zero(int l, int m);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }

    template <class F>
    [[nodiscard]] auto integrate(F&& f) const {
        using R = decltype(f(0.0));
        R acc{};
        for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
        return acc;
    }
};

/// n-point Gauss-Legendre rule on [lo, hi]; exact for polynomials of degree
/// up to 2n-1. Throws std::invalid_argument for n < 2 or lo >= hi.
QuadratureRule gauss_legendre(int n, double lo, double hi);

/// Chebyshev interpolant of a smooth function on [lo, hi], built from values
/// at Chebyshev points of the first kind.
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;

    template <class F>
    static ChebyshevSeries fit(F&& f, double lo, double hi, int degree) {
        std::vector<double> samples(static_cast<std::size_t>(degree) + 1);
        for (int j = 0; j <= degree; ++j) samples[static_cast<std::size_t>(j)] = f(node(lo, hi, degree, j));
        return ChebyshevSeries(lo, hi, samples);
    }

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double derivative(double x) const;
    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }

    static double node(double lo, double hi, int degree, int j);

private:
    ChebyshevSeries(double lo, double hi, std::span<const double> samples);

    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<double> coeffs_;
    std::vector<double> dcoeffs_;
};

}  // namespace cpsfwm::numerics
