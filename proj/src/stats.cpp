#include "trendvote/stats.hpp"

#include "trendvote/error.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace trendvote::stats {

namespace {

// Kronrod 15-point nodes/weights with the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
    double kronrod;
    double error;
};

Estimate gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double k = kKronrod[7] * fc;
    double g = kGauss[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double sum = f(center - dx) + f(center + dx);
        k += kKronrod[i] * sum;
        if (i % 2 == 1) g += kGauss[i / 2] * sum;
    }
    return {k * half, std::abs((k - g) * half)};
}

double adapt(const std::function<double(double)>& f, double lo, double hi, double tol, int depth,
             const Estimate& whole) {
    // Stop at the tolerance or once the estimate is at rounding level.
    if (whole.error <= tol || whole.error <= 64 * std::numeric_limits<double>::epsilon() * std::abs(whole.kronrod) ||
        depth <= 0) {
        return whole.kronrod;
    }
    const double mid = 0.5 * (lo + hi);
    const auto left = gauss_kronrod(f, lo, mid);
    const auto right = gauss_kronrod(f, mid, hi);
    return adapt(f, lo, mid, 0.5 * tol, depth - 1, left) + adapt(f, mid, hi, 0.5 * tol, depth - 1, right);
}

// I_x(a, b) for x at or below the mean, where the tail is short.
double lower_beta(double a, double b, double x) {
    // u = v^(1/a) turns u^(a-1) du into dv / a.
    const double upper = std::pow(x, a);
    if (upper == 0.0) return 0.0;
    const auto integrand = [a, b](double v) { return std::pow(1.0 - std::pow(v, 1.0 / a), b - 1.0); };
    const double scale = std::exp(-log_beta(a, b) - std::log(a));
    return scale * integrate(integrand, 0.0, upper, 1e-13 / scale);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol, int max_depth) {
    if (lo == hi) return 0.0;
    return adapt(f, lo, hi, abs_tol, max_depth, gauss_kronrod(f, lo, hi));
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta needs a > 0 and b > 0");
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x > a / (a + b)) return 1.0 - lower_beta(b, a, 1.0 - x);
    return lower_beta(a, b, x);
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw ValidationError("t distribution needs positive degrees of freedom");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

double student_t_cdf(double t, double df) {
    const double tail = 0.5 * student_t_two_sided_p(t, df);
    return t < 0.0 ? tail : 1.0 - tail;
}

}  // namespace trendvote::stats
