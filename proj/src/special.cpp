#include "dunkl/special.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

namespace dunkl {

namespace {

void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

// J_nu(z) for z > 0, nu > -1, via GSL; negative orders through the
// three-term recurrence J_{nu}(z) = (2(nu+1)/z) J_{nu+1}(z) - J_{nu+2}(z).
double bessel_jnu(double nu, double z) {
    disable_gsl_abort();
    gsl_sf_result res;
    if (nu >= 0.0) {
        const int status = gsl_sf_bessel_Jnu_e(nu, z, &res);
        if (status == GSL_EUNDRFLW) return 0.0;
        if (status != GSL_SUCCESS) throw std::runtime_error("bessel_jnu: GSL failure");
        return res.val;
    }
    const double a = bessel_jnu(nu + 1.0, z);
    const double b = bessel_jnu(nu + 2.0, z);
    return (2.0 * (nu + 1.0) / z) * a - b;
}

} // namespace

double hyp1f1_positive_log(double a, double b, double z) {
    if (z < 0.0 || a <= 0.0 || b <= 0.0)
        throw std::invalid_argument("hyp1f1_positive_log: needs z >= 0, a > 0, b > 0");
    if (z == 0.0) return 0.0;
    constexpr double rescale = 0x1.0p+512; // 2^512
    long double term = 1.0L, sum = 1.0L;
    double log_scale = 0.0;
    for (int n = 1; n < 100000; ++n) {
        term *= (a + n - 1) * z / ((b + n - 1) * static_cast<double>(n));
        sum += term;
        if (sum > rescale) {
            sum /= rescale;
            term /= rescale;
            log_scale += std::log(rescale);
        }
        if (n > z && term < sum * 1e-18L) break;
    }
    return log_scale + static_cast<double>(std::log(sum));
}

double hyp1f1_series(double a, double b, double z, double tol) {
    double term = 1.0, sum = 1.0;
    for (int n = 1; n < 10000; ++n) {
        term *= (a + n - 1) * z / ((b + n - 1) * n);
        sum += term;
        if (std::abs(term) < tol * std::abs(sum) && n > std::abs(z)) return sum;
    }
    throw std::runtime_error("hyp1f1_series: no convergence");
}

double bessel_j_normalized(double nu, double z) {
    if (nu <= -1.0) throw std::invalid_argument("bessel_j_normalized: nu <= -1");
    z = std::abs(z);
    if (z < 1e-3) {
        const double q = z * z / 4.0;
        return 1.0 - q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0));
    }
    const double J = bessel_jnu(nu, z);
    if (J == 0.0) return 0.0;
    const double lg = std::lgamma(nu + 1.0) + nu * std::log(2.0 / z) + std::log(std::abs(J));
    return std::copysign(std::exp(lg), J);
}

double rank1_kernel_log(double k, double u, double v) {
    const double uv = u * v;
    if (k == 0.0) return uv;
    if (uv == 0.0) return 0.0;
    if (uv > 0.0) {
        // Kummer transform: e^{uv} 1F1(k; 2k+1; -2uv) = e^{-uv} 1F1(k+1; 2k+1; 2uv)
        return -uv + hyp1f1_positive_log(k + 1.0, 2.0 * k + 1.0, 2.0 * uv);
    }
    return uv + hyp1f1_positive_log(k, 2.0 * k + 1.0, -2.0 * uv);
}

double rank1_kernel(double k, double u, double v) {
    return std::exp(rank1_kernel_log(k, u, v));
}

std::complex<double> rank1_kernel_imag(double k, double u, double xi) {
    const double z = u * xi;
    if (k == 0.0) return {std::cos(z), -std::sin(z)};
    const double re = bessel_j_normalized(k - 0.5, z);
    const double im = -z / (2.0 * k + 1.0) * bessel_j_normalized(k + 0.5, z);
    return {re, im};
}

} // namespace dunkl
