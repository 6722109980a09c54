#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace caplab {

template <typename Scalar>
inline Scalar norm_pdf(Scalar x) {
    static const Scalar inv_sqrt_2pi = Scalar(0.3989422804014326779399461);
    return inv_sqrt_2pi * std::exp(Scalar(-0.5) * x * x);
}

template <typename Scalar>
inline Scalar norm_cdf(Scalar x) {
    static const Scalar inv_sqrt2 = Scalar(0.7071067811865475244008444);
    return Scalar(0.5) * std::erfc(-x * inv_sqrt2);
}

/// Inverse standard normal CDF, Wichura's PPND16 rational approximation
/// (AS 241). Accurate to ~1e-16 relative; monotone in p.
template <typename Scalar>
inline Scalar inv_norm_cdf(Scalar p) {
    if (!(p > Scalar(0) && p < Scalar(1)))
        throw std::domain_error("inv_norm_cdf: p must be in (0,1)");
    const Scalar q = p - Scalar(0.5);
    if (std::abs(q) <= Scalar(0.425)) {
        const Scalar r = Scalar(0.180625) - q * q;
        return q *
               (((((((Scalar(2.5090809287301226727e3) * r + Scalar(3.3430575583588128105e4)) * r +
                     Scalar(6.7265770927008700853e4)) * r + Scalar(4.5921953931549871457e4)) * r +
                   Scalar(1.3731693765509461125e4)) * r + Scalar(1.9715909503065514427e3)) * r +
                 Scalar(1.3314166789178437745e2)) * r + Scalar(3.3871328727963666080e0)) /
               (((((((Scalar(5.2264952788528545610e3) * r + Scalar(2.8729085735721942674e4)) * r +
                     Scalar(3.9307895800092710610e4)) * r + Scalar(2.1213794301586595867e4)) * r +
                   Scalar(5.3941960214247511077e3)) * r + Scalar(6.8718700749205790830e2)) * r +
                 Scalar(4.2313330701600911252e1)) * r + Scalar(1));
    }
    Scalar r = (q < Scalar(0)) ? p : Scalar(1) - p;
    r = std::sqrt(-std::log(r));
    Scalar v;
    if (r <= Scalar(5)) {
        r -= Scalar(1.6);
        v = (((((((Scalar(7.74545014278341407640e-4) * r + Scalar(2.27238449892691845833e-2)) * r +
                  Scalar(2.41780725177450611770e-1)) * r + Scalar(1.27045825245236838258e0)) * r +
                Scalar(3.64784832476320460504e0)) * r + Scalar(5.76949722146069140550e0)) * r +
              Scalar(4.63033784615654529590e0)) * r + Scalar(1.42343711074968357734e0)) /
            (((((((Scalar(1.05075007164441684324e-9) * r + Scalar(5.47593808499534494600e-4)) * r +
                  Scalar(1.51986665636164571966e-2)) * r + Scalar(1.48103976427480074590e-1)) * r +
                Scalar(6.89767334985100004550e-1)) * r + Scalar(1.67638483018380384940e0)) * r +
              Scalar(2.05319162663775882187e0)) * r + Scalar(1));
    } else {
        r -= Scalar(5);
        v = (((((((Scalar(2.01033439929228813265e-7) * r + Scalar(2.71155556874348757815e-5)) * r +
                  Scalar(1.24266094738807843860e-3)) * r + Scalar(2.65321895265761230930e-2)) * r +
                Scalar(2.96560571828504891230e-1)) * r + Scalar(1.78482653991729133580e0)) * r +
              Scalar(5.46378491116411436990e0)) * r + Scalar(6.65790464350110377720e0)) /
            (((((((Scalar(2.04426310338993978564e-15) * r + Scalar(1.42151175831644588870e-7)) * r +
                  Scalar(1.84631831751005468180e-5)) * r + Scalar(7.86869131145613259100e-4)) * r +
                Scalar(1.48753612908506148525e-2)) * r + Scalar(1.36929880922735805310e-1)) * r +
              Scalar(5.99832206555887937690e-1)) * r + Scalar(1));
    }
    return (q < Scalar(0)) ? -v : v;
}

/// E[max(Z, 0)] for Z ~ N(mu, sigma^2), the ReLU-node conditional mean.
/// sigma = 0 degenerates continuously to max(mu, 0).
template <typename Scalar>
inline Scalar relu_normal_mean(Scalar mu, Scalar sigma) {
    if (sigma < Scalar(0))
        throw std::domain_error("relu_normal_mean: sigma must be >= 0");
    if (sigma == Scalar(0)) return mu > Scalar(0) ? mu : Scalar(0);
    static const Scalar sqrt_2_over_pi = Scalar(0.7978845608028653558798921);
    const Scalar z = mu / sigma;
    return Scalar(0.5) * (mu + sigma * sqrt_2_over_pi * std::exp(Scalar(-0.5) * z * z) +
                          mu * (Scalar(1) - Scalar(2) * norm_cdf(-z)));
}

}  // namespace caplab
