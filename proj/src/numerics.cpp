#include "cpsfwm/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cpsfwm::numerics {

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
    }
    return std::sin(x) / x;
}

// Poppe & Wijers (ACM TOMS 680): power series near the origin, Laplace
// continued fraction far away, and Gautschi's truncated Taylor/continued
// fraction combination in between. About 14 significant digits.
cdouble faddeeva_w(cdouble z) {
    constexpr double factor = 1.12837916709551257388;  // 2/sqrt(pi)
    const double xi = z.real();
    const double yi = z.imag();
    const double xabs = std::abs(xi);
    const double yabs = std::abs(yi);
    const double x = xabs / 6.3;
    const double y = yabs / 4.4;
    double qrho = x * x + y * y;
    double xquad = xabs * xabs - yabs * yabs;
    const double yquad = 2.0 * xabs * yabs;

    const bool series = qrho < 0.085264;
    double u = 0.0;
    double v = 0.0;
    double u2 = 0.0;
    double v2 = 0.0;

    if (series) {
        qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j;
        double ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = factor * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad);
        u2 = daux * std::cos(yquad);
        v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0.0;
        double h2 = 0.0;
        int kapn = 0;
        int nu = 0;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
        } else {
            qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
            h = 1.88 * qrho;
            h2 = 2.0 * h;
            kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
            nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
        }
        const bool taylor = h > 0.0;
        double qlambda = taylor ? std::pow(h2, kapn) : 0.0;
        double rx = 0.0;
        double ry = 0.0;
        double sx = 0.0;
        double sy = 0.0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1.0;
            double tx = yabs + h + np1 * rx;
            const double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (taylor && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (taylor) {
            u = factor * sx;
            v = factor * sy;
        } else {
            u = factor * rx;
            v = factor * ry;
        }
        if (yabs == 0.0) u = std::exp(-xabs * xabs);
    }

    // Map back from the first quadrant.
    if (yi < 0.0) {
        if (series) {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            const double w1 = 2.0 * std::exp(xquad);
            u2 = w1 * std::cos(yquad);
            v2 = -w1 * std::sin(yquad);
        }
        u = u2 - u;
        v = v2 - v;
        if (xi > 0.0) v = -v;
    } else if (xi < 0.0) {
        v = -v;
    }
    return {u, v};
}

namespace {

// Maclaurin series, used only for |z| < 1 where it has no cancellation.
cdouble erf_series(cdouble z) {
    const cdouble z2 = z * z;
    cdouble term = z;
    cdouble sum = z;
    for (int n = 1; n < 60; ++n) {
        term *= -z2 / static_cast<double>(n);
        const cdouble add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum * (2.0 / std::sqrt(std::numbers::pi));
}

// First-quadrant erf; x, y >= 0.
cdouble erf_first_quadrant(double x, double y) {
    const cdouble z(x, y);
    if (std::abs(z) < 1.0) return erf_series(z);
    const cdouble e = std::exp(cdouble(y * y - x * x, -2.0 * x * y));
    return 1.0 - e * faddeeva_w(cdouble(-y, x));
}

}  // namespace

cdouble erf_complex(cdouble z) {
    const double x = z.real();
    const double y = z.imag();
    if (!(std::abs(x) <= erf_box && std::abs(y) <= erf_box)) {
        throw std::domain_error("erf_complex: argument outside |Re|,|Im| <= 25");
    }
    const cdouble q = erf_first_quadrant(std::abs(x), std::abs(y));
    // erf is odd and commutes with conjugation.
    const double re = std::signbit(x) ? -q.real() : q.real();
    const double im = std::signbit(y) ? -q.imag() : q.imag();
    return {re, im};
}

cdouble scaled_erf(double a, double b) {
    if (a < 0.0) return -scaled_erf(-a, -b);
    const cdouble tail = std::exp(cdouble(-a * a, -2.0 * a * b)) * faddeeva_w(cdouble(-b, a));
    return std::exp(-b * b) - tail;
}

double bessel_j(int l, double x) {
    if (l < 0 || !(x >= 0.0)) throw std::invalid_argument("bessel_j: need l >= 0 and x >= 0");
    return std::cyl_bessel_j(static_cast<double>(l), x);
}

double bessel_k(int l, double x) {
    if (l < 0) throw std::invalid_argument("bessel_k: need l >= 0");
    if (!(x > 0.0)) throw std::domain_error("bessel_k: singular at x <= 0");
    return std::cyl_bessel_k(static_cast<double>(l), x);
}

double bessel_j_zero(int l, int m) {
    if (l < 0 || m < 1) throw std::invalid_argument("bessel_j_zero: need l >= 0, m >= 1");
    constexpr double step = 0.05;
    double a = (l == 0) ? step : l + step;
    double fa = bessel_j(l, a);
    int found = 0;
    for (;;) {
        const double b = a + step;
        const double fb = bessel_j(l, b);
        if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            if (++found == m) {
                double lo = a;
                double hi = b;
                double flo = fa;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_j(l, mid);
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        fa = fb;
    }
}

QuadratureRule gauss_legendre(int n, double lo, double hi) {
    if (n < 2) throw std::invalid_argument("gauss_legendre: need n >= 2");
    if (!(lo < hi)) throw std::invalid_argument("gauss_legendre: empty or inverted interval");

    const auto un = static_cast<std::size_t>(n);
    std::vector<double> t(un);
    std::vector<double> w(un);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double wi = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto ii = static_cast<std::size_t>(i);
        t[ii] = -x;
        t[un - 1 - ii] = x;
        w[ii] = wi;
        w[un - 1 - ii] = wi;
    }
    if (n % 2 == 1) t[un / 2] = 0.0;

    QuadratureRule rule;
    rule.lo = lo;
    rule.hi = hi;
    rule.nodes.resize(un);
    rule.weights.resize(un);
    const double mid = 0.5 * (lo + hi);
    const double half_width = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < un; ++k) {
        rule.nodes[k] = mid + half_width * t[k];
        rule.weights[k] = half_width * w[k];
    }
    return rule;
}

double ChebyshevSeries::node(double lo, double hi, int degree, int j) {
    const double t = std::cos(std::numbers::pi * (j + 0.5) / (degree + 1));
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
}

ChebyshevSeries::ChebyshevSeries(double lo, double hi, std::span<const double> samples)
    : lo_(lo), hi_(hi) {
    const std::size_t n = samples.size();
    coeffs_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += samples[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (j + 0.5) / static_cast<double>(n));
        }
        coeffs_[k] = 2.0 * s / static_cast<double>(n);
    }
    coeffs_[0] *= 0.5;

    dcoeffs_.assign(n, 0.0);
    if (n >= 2) {
        // c'_{k-1} = c'_{k+1} + 2k c_k, on the reference interval [-1, 1].
        for (std::size_t k = n - 1; k >= 1; --k) {
            const double next = (k + 1 < n) ? dcoeffs_[k + 1] : 0.0;
            dcoeffs_[k - 1] = next + 2.0 * static_cast<double>(k) * coeffs_[k];
        }
        dcoeffs_[0] *= 0.5;
        const double scale = 2.0 / (hi_ - lo_);
        for (double& c : dcoeffs_) c *= scale;
    }
}

namespace {
double clenshaw(const std::vector<double>& c, double t) {
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}
}  // namespace

double ChebyshevSeries::operator()(double x) const {
    const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    return clenshaw(coeffs_, t);
}

double ChebyshevSeries::derivative(double x) const {
    const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    return clenshaw(dcoeffs_, t);
}

}  // namespace cpsfwm::numerics
