#pragma once

// Integer-order modified Bessel functions of the second kind K_n(z) and the
// integer gamma function. Double precision, relative error <= 1e-10 for
// n <= 32 and z in [1e-8, 50].

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace irsnoma {

// Gamma(n) = (n-1)!. Exact through n = 21 (20! still fits in 64 bits).
inline double gamma_int(int n) {
    if (n <= 0) {
        throw std::domain_error("gamma_int: argument must be a positive integer, got " +
                                std::to_string(n));
    }
    if (n <= 21) {
        std::uint64_t f = 1;
        for (int k = 2; k < n; ++k) f *= static_cast<std::uint64_t>(k);
        return static_cast<double>(f);
    }
    return std::tgamma(static_cast<double>(n));
}

namespace detail {

constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

// Ascending series for K_0 and K_1, accurate for z < 2 where the
// (z^2/4)^k terms decay fast and the log cancellation stays mild.
inline void bessel_k01_series(double z, double& k0, double& k1) {
    const double t = 0.25 * z * z;
    const double lz = std::log(0.5 * z);

    // K_0 = -(log(z/2) + gamma) I_0 + sum_{k>=1} t^k/(k!)^2 H_k
    double i0 = 1.0;
    double term = 1.0;
    double s0 = 0.0;
    double hk = 0.0;
    for (int k = 1; k < 64; ++k) {
        term *= t / (static_cast<double>(k) * k);
        i0 += term;
        hk += 1.0 / k;
        s0 += term * hk;
        if (term * (hk + 1.0) < 1e-18 * i0) break;
    }
    k0 = -(lz + kEulerGamma) * i0 + s0;

    // K_1 = 1/z + log(z/2) I_1 - (z/4) sum_{k>=0} (H_k + H_{k+1} - 2 gamma) c_k
    // with c_k = t^k / (k! (k+1)!) and I_1 = (z/2) sum c_k.
    double ck = 1.0;
    double si = ck;                         // sum of c_k
    double hk1 = 1.0;                       // H_{k+1}
    double sw = ck * (0.0 + hk1 - 2.0 * kEulerGamma);
    double hkk = 0.0;                       // H_k
    for (int k = 1; k < 64; ++k) {
        ck *= t / (static_cast<double>(k) * (k + 1));
        hkk += 1.0 / k;
        hk1 += 1.0 / (k + 1);
        si += ck;
        sw += ck * (hkk + hk1 - 2.0 * kEulerGamma);
        if (ck * (hkk + hk1 + 2.0) < 1e-18 * si) break;
    }
    const double i1 = 0.5 * z * si;
    k1 = 1.0 / z + lz * i1 - 0.25 * z * sw;
}

// Thompson-Barnett continued fraction (CF2) at order mu = 0, valid for
// z >= 2. Produces K_0 and K_1 to near machine precision without the
// exponential cancellation an ascending series would incur here.
inline void bessel_k01_cf2(double z, double& k0, double& k1) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int max_iter = 30000;

    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= max_iter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) <= eps) break;
    }
    h = a1 * h;
    const double pi = 3.141592653589793238462643383279502884;
    k0 = std::sqrt(pi / (2.0 * z)) * std::exp(-z) / s;
    k1 = k0 * (z + 0.5 - h) / z;
}

}  // namespace detail

// K_n(z) for integer n >= 0, z > 0.
inline double bessel_k_int(int n, double z) {
    if (n < 0) {
        throw std::domain_error("bessel_k_int: order must be non-negative, got " +
                                std::to_string(n));
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw std::domain_error("bessel_k_int: argument must be positive and finite");
    }

    double k0, k1;
    if (z < 2.0) {
        detail::bessel_k01_series(z, k0, k1);
    } else {
        detail::bessel_k01_cf2(z, k0, k1);
    }
    if (n == 0) return k0;
    if (n == 1) return k1;

    // Upward recurrence K_{m+1} = K_{m-1} + (2m/z) K_m; stable since K_n
    // grows with the order.
    double km = k0;
    double kn = k1;
    for (int m = 1; m < n; ++m) {
        const double knext = km + (2.0 * m / z) * kn;
        km = kn;
        kn = knext;
    }
    return kn;
}

}  // namespace irsnoma
