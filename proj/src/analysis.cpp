#include "epsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace epsim {

namespace {

// Gaussian elimination with partial pivoting; a is n x n row-major,
// b is the right-hand side, overwritten with the solution.
bool solve_linear(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (a[pivot * n + col] == 0.0) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int i = 0; i < n; ++i) b[i] /= a[i * n + i];
    return true;
}

// Inverse via elimination on an augmented identity.
bool invert_matrix(const std::vector<double>& a_in, std::vector<double>& inv, int n) {
    std::vector<double> a = a_in;
    inv.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (a[pivot * n + col] == 0.0) return false;
        if (pivot != col)
            for (int c = 0; c < n; ++c) {
                std::swap(a[col * n + c], a[pivot * n + c]);
                std::swap(inv[col * n + c], inv[pivot * n + c]);
            }
        const double piv = a[col * n + col];
        for (int c = 0; c < n; ++c) {
            a[col * n + c] /= piv;
            inv[col * n + c] /= piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col];
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return true;
}

struct LinearCosine {
    double p = 0.0, q = 0.0, d = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

// For fixed omega, y = p cos(wx) + q sin(wx) + d is linear.
LinearCosine solve_at_frequency(std::span<const double> x, std::span<const double> y,
                                const std::vector<double>& w, double omega) {
    std::vector<double> ata(9, 0.0), atb(3, 0.0);
    const size_t n = x.size();
    for (size_t i = 0; i < n; ++i) {
        const double c = std::cos(omega * x[i]);
        const double s = std::sin(omega * x[i]);
        const double basis[3] = {c, s, 1.0};
        for (int r = 0; r < 3; ++r) {
            for (int cidx = 0; cidx < 3; ++cidx) ata[r * 3 + cidx] += w[i] * basis[r] * basis[cidx];
            atb[r] += w[i] * basis[r] * y[i];
        }
    }
    LinearCosine out;
    std::vector<double> rhs = atb;
    if (!solve_linear(ata, rhs, 3)) return out;
    out.p = rhs[0];
    out.q = rhs[1];
    out.d = rhs[2];
    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double model = out.p * std::cos(omega * x[i]) + out.q * std::sin(omega * x[i]) + out.d;
        sse += w[i] * (y[i] - model) * (y[i] - model);
    }
    out.sse = sse;
    return out;
}

} // namespace

CosineFit fit_cosine(std::span<const double> x, std::span<const double> y,
                     std::span<const double> y_errors) {
    const size_t n = x.size();
    if (n != y.size() || n < 5)
        throw std::invalid_argument("fit_cosine: need at least 5 matched samples");
    if (!y_errors.empty() && y_errors.size() != n)
        throw std::invalid_argument("fit_cosine: error vector size mismatch");

    std::vector<double> w(n, 1.0);
    const bool weighted = !y_errors.empty();
    if (weighted)
        for (size_t i = 0; i < n; ++i) {
            if (!(y_errors[i] > 0.0))
                throw std::invalid_argument("fit_cosine: errors must be positive");
            w[i] = 1.0 / (y_errors[i] * y_errors[i]);
        }

    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax_it - *xmin_it;
    if (!(span > 0.0)) throw std::invalid_argument("fit_cosine: degenerate x span");
    double min_gap = span;
    {
        std::vector<double> xs(x.begin(), x.end());
        std::sort(xs.begin(), xs.end());
        for (size_t i = 1; i < n; ++i)
            if (xs[i] - xs[i - 1] > 0.0) min_gap = std::min(min_gap, xs[i] - xs[i - 1]);
    }

    // Coarse frequency search: half a period over twice the span, up to the
    // sampling limit.
    const double omega_lo = 0.5 * kPi / span;
    const double omega_hi = kPi / min_gap;
    const int grid = 1024;
    double best_omega = omega_lo;
    int best_index = 0;
    LinearCosine best;
    std::vector<std::pair<double, double>> scores;  // (omega, sse), coarse diagnostics
    for (int i = 0; i < grid; ++i) {
        const double f = static_cast<double>(i) / (grid - 1);
        const double omega = omega_lo * std::pow(omega_hi / omega_lo, f);
        const LinearCosine cand = solve_at_frequency(x, y, w, omega);
        if (i < 8) scores.emplace_back(omega, cand.sse);
        if (cand.sse < best.sse) {
            best = cand;
            best_omega = omega;
            best_index = i;
        }
    }
    if (!std::isfinite(best.sse) || best_index == 0) {
        std::ostringstream msg;
        msg << "fit_cosine: could not bracket a period (span " << span << "); coarse scores:";
        for (auto& [om, sse] : scores) msg << " (" << om << ", " << sse << ")";
        throw FitError(msg.str(), std::sqrt(best.sse));
    }

    // Damped Gauss-Newton on (p, q, d, omega).
    double p = best.p, q = best.q, d = best.d, omega = best_omega;
    double current = best.sse;
    double damp = 1e-6;
    int iter = 0;
    bool converged = false;
    auto model_sse = [&](double pp, double qq, double dd, double om) {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double m = pp * std::cos(om * x[i]) + qq * std::sin(om * x[i]) + dd;
            acc += w[i] * (y[i] - m) * (y[i] - m);
        }
        return acc;
    };
    for (; iter < 200 && !converged; ++iter) {
        std::vector<double> jtj(16, 0.0), jtr(4, 0.0);
        for (size_t i = 0; i < n; ++i) {
            const double c = std::cos(omega * x[i]);
            const double s = std::sin(omega * x[i]);
            const double jac[4] = {c, s, 1.0, x[i] * (-p * s + q * c)};
            const double r = y[i] - (p * c + q * s + d);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) jtj[a * 4 + b] += w[i] * jac[a] * jac[b];
                jtr[a] += w[i] * jac[a] * r;
            }
        }
        bool stepped = false;
        for (int attempt = 0; attempt < 16; ++attempt) {
            std::vector<double> a = jtj;
            for (int k = 0; k < 4; ++k) a[k * 4 + k] *= 1.0 + damp;
            std::vector<double> step = jtr;
            if (solve_linear(a, step, 4)) {
                const double pn = p + step[0], qn = q + step[1], dn = d + step[2],
                             on = omega + step[3];
                if (on > 0.0) {
                    const double next = model_sse(pn, qn, dn, on);
                    if (next <= current) {
                        const double scale = std::max({std::abs(p), std::abs(q), std::abs(d), 1e-12});
                        const double rel = std::max(
                            {std::abs(step[0]) / scale, std::abs(step[1]) / scale,
                             std::abs(step[2]) / scale, std::abs(step[3]) / omega});
                        p = pn; q = qn; d = dn; omega = on;
                        current = next;
                        damp = std::max(damp * 0.3, 1e-14);
                        stepped = true;
                        if (rel < 1e-10) converged = true;
                        break;
                    }
                }
            }
            damp *= 10.0;
        }
        if (!stepped) {
            double grad = 0.0;
            for (double g : jtr) grad += g * g;
            if (std::sqrt(grad) < 1e-12 * std::max(current, 1.0)) {
                converged = true;
            } else {
                throw FitError("fit_cosine: no convergence after damping exhausted",
                               std::sqrt(current));
            }
        }
    }
    if (!converged)
        throw FitError("fit_cosine: no convergence within 200 iterations", std::sqrt(current));

    // Covariance of (p, q, d, omega) from the final Jacobian.
    std::vector<double> jtj(16, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double c = std::cos(omega * x[i]);
        const double s = std::sin(omega * x[i]);
        const double jac[4] = {c, s, 1.0, x[i] * (-p * s + q * c)};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) jtj[a * 4 + b] += w[i] * jac[a] * jac[b];
    }
    std::vector<double> cov;
    const bool have_cov = invert_matrix(jtj, cov, 4);
    double scale2 = 1.0;
    if (!weighted && n > 4) scale2 = current / static_cast<double>(n - 4);

    CosineFit fit;
    fit.angular_frequency = omega;
    fit.offset = d;
    fit.amplitude = std::hypot(p, q);
    fit.phase = std::atan2(-q, p);
    fit.residual_norm = std::sqrt(current);
    fit.iterations = iter;
    if (have_cov && fit.amplitude > 0.0) {
        const double a = fit.amplitude;
        const double cpp = cov[0] * scale2, cqq = cov[5] * scale2, cpq = cov[1] * scale2;
        fit.amplitude_sigma =
            std::sqrt(std::max((p * p * cpp + q * q * cqq + 2.0 * p * q * cpq) / (a * a), 0.0));
        fit.phase_sigma =
            std::sqrt(std::max((q * q * cpp + p * p * cqq - 2.0 * p * q * cpq) / (a * a * a * a), 0.0));
        fit.offset_sigma = std::sqrt(std::max(cov[10] * scale2, 0.0));
        fit.frequency_sigma = std::sqrt(std::max(cov[15] * scale2, 0.0));
    }
    return fit;
}

VisibilityResult visibility(const CosineFit& fit) {
    if (!(fit.offset > 0.0)) throw FitError("visibility: fit offset must be positive");
    VisibilityResult out;
    out.value = fit.amplitude / fit.offset;
    if (fit.amplitude > 0.0) {
        const double ra = fit.amplitude_sigma / fit.amplitude;
        const double rd = fit.offset_sigma / fit.offset;
        out.sigma = out.value * std::sqrt(ra * ra + rd * rd);
    } else {
        out.sigma = fit.amplitude_sigma / fit.offset;
    }
    return out;
}

Correlation correlation_e(double n11, double n12, double n21, double n22) {
    return correlation_e(n11, n12, n21, n22, std::sqrt(std::abs(n11)), std::sqrt(std::abs(n12)),
                         std::sqrt(std::abs(n21)), std::sqrt(std::abs(n22)));
}

Correlation correlation_e(double n11, double n12, double n21, double n22, double s11,
                          double s12, double s21, double s22) {
    const double total = n11 + n12 + n21 + n22;
    if (!(total > 0.0)) throw std::domain_error("correlation_e: undefined for non-positive total");
    Correlation out;
    out.e = (n11 + n22 - n12 - n21) / total;
    const double signs[4] = {1.0, -1.0, -1.0, 1.0};
    const double sigmas[4] = {s11, s12, s21, s22};
    double var = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double partial = (signs[i] - out.e) / total;
        var += partial * partial * sigmas[i] * sigmas[i];
    }
    out.sigma = std::sqrt(var);
    return out;
}

ChshResult chsh_s(const Correlation& e_ab, const Correlation& e_abp, const Correlation& e_apb,
                  const Correlation& e_apbp) {
    const double e[4] = {e_ab.e, e_abp.e, e_apb.e, e_apbp.e};
    const double var = e_ab.sigma * e_ab.sigma + e_abp.sigma * e_abp.sigma +
                       e_apb.sigma * e_apb.sigma + e_apbp.sigma * e_apbp.sigma;
    ChshResult result;
    for (int neg = 0; neg < 4; ++neg) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += (i == neg ? -e[i] : e[i]);
        if (std::abs(s) > result.s) {
            result.s = std::abs(s);
            result.sign_pattern = neg;
        }
    }
    result.s_error = std::sqrt(var);
    if (result.s_error > 0.0) {
        result.sigma_violation = (result.s - 2.0) / result.s_error;
    } else {
        result.sigma_violation = result.s > 2.0 ? std::numeric_limits<double>::infinity()
                                                : -std::numeric_limits<double>::infinity();
    }
    result.visibility_vs = result.s / (2.0 * std::sqrt(2.0));
    const double v_clamped = std::clamp(result.visibility_vs, 0.0, 1.0);
    result.fidelity_lower_bound = fidelity_bound(v_clamped);
    result.fidelity_werner_overlap = werner_overlap(v_clamped);
    return result;
}

} // namespace epsim
