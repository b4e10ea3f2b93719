#include "cfgdist/bp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace cfgdist {

double WEstimate::mean() const {
    if (samples.empty()) return 0.0;
    return std::accumulate(samples.begin(), samples.end(), 0.0) /
           static_cast<double>(samples.size());
}

int default_w_depth(double nu) {
    if (!(nu > 1.0)) throw std::invalid_argument("default_w_depth: nu > 1");
    return static_cast<int>(std::ceil(std::log(1e6) / std::log(nu))) + 1;
}

namespace {

// sum_j f_j s^j over the degree law, early exit on negligible remaining mass
double degree_generating_fn(const DegreeLaw& f, double s) {
    double acc = 0.0, sp = 1.0;
    constexpr std::int64_t cap = std::int64_t{1} << 22;
    for (std::int64_t j = 0; j < cap; ++j) {
        acc += f.pmf(j) * sp;
        const double remaining = 1.0 - f.cdf(j);
        sp *= s;
        if (remaining * sp < 1e-15) break;
    }
    return acc;
}

} // namespace

ExtinctionResult extinction_probability(const DegreeLaw& f, const OffspringLaw& g) {
    // monotone iteration from 0 reaches the smallest fixed point for any g;
    // subcritical laws just land on s* = 1, q = 0
    ExtinctionResult out;
    double s = 0.0;
    constexpr int max_iter = 1'000'000;
    int it = 0;
    for (; it < max_iter; ++it) {
        const double next = g.generating_fn(s);
        if (std::abs(next - s) < 1e-13) {
            s = next;
            break;
        }
        s = next;
    }
    if (it >= max_iter)
        throw NonConvergenceError("extinction_probability: fixed point did not converge");
    out.s_star = s;
    out.iterations = it + 1;
    out.q = 1.0 - degree_generating_fn(f, s);
    return out;
}

double limit_survival_at(double x, std::span<const WPair> w_pairs,
                         const MomentSummary& moments) {
    if (!moments.supercritical)
        throw std::invalid_argument("limit law: requires a supercritical law");
    const double lambda = moments.kappa * std::pow(moments.nu, x);
    double sum = 0.0;
    std::int64_t alive = 0;
    for (const auto& [w1, w2] : w_pairs) {
        const double prod = w1 * w2;
        if (prod > 0.0) {
            sum += std::exp(-lambda * prod);
            ++alive;
        }
    }
    if (alive == 0) throw std::invalid_argument("limit law: no surviving W pairs");
    return sum / static_cast<double>(alive);
}

LimitLawResult eval_limit_law(double a, std::int64_t k_min, std::int64_t k_max,
                              std::span<const WPair> w_pairs, const MomentSummary& moments) {
    if (!(a > -1.0 && a <= 0.0)) throw std::invalid_argument("eval_limit_law: a in (-1, 0]");
    if (k_min > k_max) throw std::invalid_argument("eval_limit_law: empty k range");
    LimitLawResult out;
    out.a = a;
    out.kappa = moments.kappa;
    out.k_min = k_min;
    for (const auto& [w1, w2] : w_pairs)
        if (w1 * w2 > 0.0) ++out.surviving_pairs;
    out.survival.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    for (std::int64_t k = k_min; k <= k_max; ++k)
        out.survival.push_back(limit_survival_at(a + static_cast<double>(k), w_pairs, moments));
    return out;
}

double unconditional_survival(double a, std::int64_t k, std::span<const WPair> w_pairs,
                              const MomentSummary& moments) {
    if (!(a > -1.0 && a <= 0.0)) throw std::invalid_argument("unconditional_survival: a in (-1, 0]");
    if (w_pairs.empty()) throw std::invalid_argument("unconditional_survival: empty sample set");
    const double lambda = moments.kappa * std::pow(moments.nu, a + static_cast<double>(k));
    double sum = 0.0;
    for (const auto& [w1, w2] : w_pairs) sum += std::exp(-lambda * w1 * w2);
    return sum / static_cast<double>(w_pairs.size());
}

ExpectedRResult expected_r(double a, std::span<const WPair> w_pairs,
                           const MomentSummary& moments, std::int64_t window) {
    if (window < 1) throw std::invalid_argument("expected_r: window >= 1");
    const double hi_tail = limit_survival_at(a + static_cast<double>(window), w_pairs, moments);
    const double lo_tail =
        1.0 - limit_survival_at(a - static_cast<double>(window), w_pairs, moments);
    if (hi_tail > 1e-6 || lo_tail > 1e-6)
        throw std::invalid_argument(
            "expected_r: window too small, tail survival " + std::to_string(hi_tail) + " / " +
            std::to_string(lo_tail) + " above 1e-6");

    ExpectedRResult out;
    for (std::int64_t k = 0; k <= window; ++k)
        out.value += limit_survival_at(a + static_cast<double>(k), w_pairs, moments);
    for (std::int64_t k = -window; k < 0; ++k)
        out.value -= 1.0 - limit_survival_at(a + static_cast<double>(k), w_pairs, moments);

    constexpr std::int64_t extension = 80;
    for (std::int64_t k = window + 1; k <= window + extension; ++k)
        out.truncation_bound += limit_survival_at(a + static_cast<double>(k), w_pairs, moments);
    for (std::int64_t k = -window - extension; k < -window; ++k)
        out.truncation_bound += 1.0 - limit_survival_at(a + static_cast<double>(k), w_pairs, moments);
    return out;
}

// ---------------------------------------------------------------------------
// Characteristic-function fixed point for the law of W

namespace {

using cplx = std::complex<double>;

// in-place radix-2 FFT with kernel e^{-2 pi i jk / n}
void fft(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx x = a[i + j];
                const cplx y = a[i + j + len / 2] * w;
                a[i + j] = x + y;
                a[i + j + len / 2] = x - y;
                w *= wl;
            }
        }
    }
}

// pmf coefficients with their running remaining-mass, for truncated complex
// generating-function evaluation
struct CoeffTable {
    std::vector<double> coef;
    std::vector<double> remaining; // mass strictly above index j

    template <class Law>
    static CoeffTable build(const Law& law, std::int64_t cap) {
        CoeffTable t;
        double acc = 0.0;
        for (std::int64_t j = 0; j < cap; ++j) {
            const double p = law.pmf(j);
            t.coef.push_back(p);
            acc += p;
            t.remaining.push_back(std::max(0.0, 1.0 - acc));
            if (t.remaining.back() < 1e-14) break;
        }
        return t;
    }

    cplx eval(cplx z) const {
        cplx acc(0.0);
        cplx zp(1.0);
        double zmag = 1.0;
        const double r = std::abs(z);
        for (std::size_t j = 0; j < coef.size(); ++j) {
            acc += coef[j] * zp;
            zp *= z;
            zmag *= r;
            if (remaining[j] * zmag < 1e-13) break;
        }
        return acc;
    }
};

} // namespace

double DiscretizedW::cdf_at(double q) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] > q) break;
        acc += prob[j];
    }
    return acc;
}

DiscretizedW w_law_fixed_point(const DegreeLaw& f, const OffspringLaw& g, WLawGrid grid,
                               int iters) {
    const MomentSummary m = f.moments();
    if (!(m.nu > 1.0)) throw std::invalid_argument("w_law_fixed_point: requires nu > 1");
    if (grid.bins < 16 || (grid.bins & (grid.bins - 1)) != 0)
        throw std::invalid_argument("w_law_fixed_point: bins must be a power of two >= 16");
    const std::int64_t bins = grid.bins;
    const double h = grid.step;
    const double dt = 2.0 * M_PI / (static_cast<double>(bins) * h);
    const std::int64_t half = bins / 2;
    const double nu = m.nu;

    const CoeffTable fc = CoeffTable::build(f, std::int64_t{1} << 17);

    // --- behaviour of log phi near zero -------------------------------------
    // psi(t) = log phi(t) = it + chi(t), with chi solving
    // chi(t) = nu chi(t/nu) + d(t/nu) to first order, where
    // d(u) = log G_g(e^{iu}) - i nu u. Fitting d on a few tiny arguments gives
    // chi(t) = sum_b c_b t^b with c_b = d_b nu^{-b} / (1 - nu^{1-b}); this
    // carries the fractional power that heavy-tailed offspring forces on chi
    // (infinite variance makes a quadratic base plain wrong).
    std::vector<double> betas{2.0, 3.0};
    if (const auto alpha = g.power_tail_index())
        if (*alpha < 3.0 && std::abs(*alpha - 2.0) > 0.05 && std::abs(*alpha - 3.0) > 0.05)
            betas.insert(betas.begin() + (*alpha < 2.0 ? 0 : 1), *alpha);
    const std::size_t nb = betas.size();
    std::vector<cplx> fit_a(nb * nb), fit_rhs(nb);
    const double u0 = 3e-4;
    for (std::size_t i = 0; i < nb; ++i) {
        const double u = u0 * std::pow(2.0, static_cast<double>(i));
        fit_rhs[i] = std::log(g.generating_fn(std::exp(cplx(0.0, u)))) - cplx(0.0, nu * u);
        for (std::size_t b = 0; b < nb; ++b) fit_a[i * nb + b] = std::pow(u, betas[b]);
    }
    // tiny Gaussian elimination
    for (std::size_t col = 0; col < nb; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < nb; ++r)
            if (std::abs(fit_a[r * nb + col]) > std::abs(fit_a[piv * nb + col])) piv = r;
        for (std::size_t c = 0; c < nb; ++c) std::swap(fit_a[col * nb + c], fit_a[piv * nb + c]);
        std::swap(fit_rhs[col], fit_rhs[piv]);
        for (std::size_t r = col + 1; r < nb; ++r) {
            const cplx fct = fit_a[r * nb + col] / fit_a[col * nb + col];
            for (std::size_t c = col; c < nb; ++c) fit_a[r * nb + c] -= fct * fit_a[col * nb + c];
            fit_rhs[r] -= fct * fit_rhs[col];
        }
    }
    std::vector<cplx> base_coef(nb);
    for (std::size_t r = nb; r-- > 0;) {
        cplx acc = fit_rhs[r];
        for (std::size_t c = r + 1; c < nb; ++c) acc -= fit_a[r * nb + c] * base_coef[c];
        base_coef[r] = acc / fit_a[r * nb + r];
    }
    for (std::size_t b = 0; b < nb; ++b)
        base_coef[b] *= std::pow(nu, -betas[b]) / (1.0 - std::pow(nu, 1.0 - betas[b]));
    auto chi_base = [&](double s) {
        cplx acc(0.0);
        for (std::size_t b = 0; b < nb; ++b) acc += base_coef[b] * std::pow(s, betas[b]);
        return acc;
    };

    // --- geometric ladder below the uniform grid ----------------------------
    // chi is smooth on a log-s scale, so a few dozen nodes per nu-octave
    // interpolate it essentially exactly where the uniform grid is too coarse.
    const double ladder_lo = std::min(2e-3, 0.9 * dt / nu);
    const double ladder_hi = 0.2;
    const double lstep = std::log(nu) / 48.0;
    const int nladder =
        static_cast<int>(std::ceil(std::log(ladder_hi / ladder_lo) / lstep)) + 2;
    std::vector<cplx> chi_ladder(static_cast<std::size_t>(nladder));
    auto ladder_s = [&](int i) { return ladder_lo * std::exp(lstep * static_cast<double>(i)); };
    auto query_psi = [&](double s) -> cplx {
        if (s <= ladder_lo) return cplx(0.0, s) + chi_base(s);
        const double pos = std::log(s / ladder_lo) / lstep;
        const auto i = std::min(static_cast<std::size_t>(pos),
                                static_cast<std::size_t>(nladder) - 2);
        const double fr = std::min(pos - static_cast<double>(i), 1.0);
        return cplx(0.0, s) + chi_ladder[i] * (1.0 - fr) + chi_ladder[i + 1] * fr;
    };
    for (int i = 0; i < nladder; ++i) {
        const double s = ladder_s(i);
        const cplx w = g.generating_fn(std::exp(query_psi(s / nu)));
        chi_ladder[static_cast<std::size_t>(i)] = std::log(w) - cplx(0.0, s);
    }

    // --- uniform grid, ascending --------------------------------------------
    // Above the ladder each point needs phi at t/nu, already known. The grid
    // stores log-magnitude and unwrapped phase; interpolating in that domain
    // is exact for pure rotation, so the chord error of a rotating complex
    // value cannot be amplified by the recursion.
    std::vector<double> lmag(static_cast<std::size_t>(half) + 1, 0.0);
    std::vector<double> phase(static_cast<std::size_t>(half) + 1, 0.0);
    auto lerp_phi = [&](double t) -> cplx {
        const double pos = t / dt;
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 > static_cast<std::size_t>(half))
            return std::polar(std::exp(lmag[static_cast<std::size_t>(half)]),
                              phase[static_cast<std::size_t>(half)]);
        const double fr = pos - static_cast<double>(i);
        return std::polar(std::exp(lmag[i] * (1.0 - fr) + lmag[i + 1] * fr),
                          phase[i] * (1.0 - fr) + phase[i + 1] * fr);
    };
    auto store = [&](std::int64_t k, cplx w) {
        const std::size_t i = static_cast<std::size_t>(k);
        lmag[i] = std::log(std::max(std::abs(w), 1e-60));
        const double raw = std::arg(w);
        const double predict = k >= 2 ? 2.0 * phase[i - 1] - phase[i - 2]
                                      : static_cast<double>(k) * dt;
        phase[i] = raw + 2.0 * M_PI * std::round((predict - raw) / (2.0 * M_PI));
    };
    for (int pass = 0; pass < std::max(iters, 1); ++pass) {
        for (std::int64_t k = 1; k <= half; ++k) {
            const double t = static_cast<double>(k) * dt;
            const double down = t / nu;
            const cplx z = down <= ladder_hi ? std::exp(query_psi(down)) : lerp_phi(down);
            store(k, g.generating_fn(z));
        }
    }

    // delayed composition and inversion: W = (1/mu) sum_{i<=D} W'_i
    auto eval_phi_prime = [&](double t) -> cplx {
        if (t <= ladder_hi) return std::exp(query_psi(t));
        if (t <= static_cast<double>(half) * dt) return lerp_phi(t);
        // only reachable when mu < 1: descend into the grid range, rebuild up
        int depth = 0;
        double s = t;
        while (s > static_cast<double>(half) * dt) {
            s /= nu;
            ++depth;
        }
        cplx z = lerp_phi(s);
        for (int d = 0; d < depth; ++d) z = g.generating_fn(z);
        return z;
    };

    // Gaussian smoothing wide enough that the spectrum is dead at the cut
    // (no truncation ringing); the window is shifted left so the part of the
    // smoothed density that leaks below zero is captured instead of wrapping
    // around the periodic grid, then folded back into the x = 0 bin.
    const double smear = 2.0 * h;
    const std::int64_t shift_bins = 32;
    const double x_shift = static_cast<double>(shift_bins) * h;
    std::vector<cplx> spec(static_cast<std::size_t>(bins), cplx(0.0));
    for (std::int64_t k = 0; k <= half; ++k) {
        const double t = static_cast<double>(k) * dt;
        const cplx w_cf = fc.eval(eval_phi_prime(t / m.mu));
        const double damp = std::exp(-0.5 * smear * smear * t * t);
        const double trap = (k == 0 || k == half) ? 0.5 : 1.0;
        spec[static_cast<std::size_t>(k)] =
            w_cf * damp * trap * std::exp(cplx(0.0, t * x_shift));
    }
    fft(spec);

    DiscretizedW out;
    out.x.resize(static_cast<std::size_t>(bins - shift_bins));
    out.prob.assign(static_cast<std::size_t>(bins - shift_bins), 0.0);
    const double scale = dt / M_PI * h;
    double mass = 0.0, mean = 0.0;
    for (std::int64_t j = 0; j < bins - shift_bins; ++j)
        out.x[static_cast<std::size_t>(j)] = static_cast<double>(j) * h;
    for (std::int64_t j = 0; j < bins; ++j) {
        const double pj = scale * spec[static_cast<std::size_t>(j)].real();
        // reflect the smoothing leak at x < 0 back onto the positive axis,
        // which keeps the mass local to where it came from
        const std::int64_t bin = std::abs(j - shift_bins);
        out.prob[static_cast<std::size_t>(bin)] += pj;
        mass += pj;
        mean += out.x[static_cast<std::size_t>(bin)] * pj;
    }
    out.raw_mass = mass;
    out.mean = mean;
    double clipped = 0.0;
    for (double& p : out.prob) {
        if (p < 0.0) p = 0.0;
        clipped += p;
    }
    if (clipped > 0.0)
        for (double& p : out.prob) p /= clipped;
    return out;
}

} // namespace cfgdist
