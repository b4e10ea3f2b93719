#include "cfgdist/degree_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cfgdist {

namespace {

constexpr double kTableTail = 1e-15;   // sampling-table truncation
constexpr double kMomentTail = 1e-12;  // certified moment truncation
constexpr std::int64_t kMaxTable = std::int64_t{1} << 22;

double parse_real(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("degree law config: missing key '" + key + "'");
    return std::stod(it->second);
}

std::string format_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// OffspringLaw

OffspringLaw OffspringLaw::point_mass(std::int64_t j, double mean) {
    OffspringLaw g;
    g.kind_ = Kind::point_mass;
    g.point_ = j;
    g.mean_ = mean;
    return g;
}

OffspringLaw OffspringLaw::geometric_shifted(double p) {
    OffspringLaw g;
    g.kind_ = Kind::geometric_shifted;
    g.p_ = p;
    g.log1mp_ = std::log1p(-p);
    g.mean_ = 1.0 / p;
    return g;
}

OffspringLaw OffspringLaw::from_table(std::vector<double> probs, double tail_mass, double mean) {
    OffspringLaw g;
    g.kind_ = Kind::table;
    g.probs_ = std::move(probs);
    g.cdf_.resize(g.probs_.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < g.probs_.size(); ++j) {
        acc += g.probs_[j];
        g.cdf_[j] = std::min(acc, 1.0);
    }
    g.tail_mass_ = tail_mass;
    g.mean_ = mean;
    return g;
}

double OffspringLaw::pareto_tail_survival(std::int64_t j) const {
    // P(offspring >= j) = sum_{k >= j+1} k f_k / mu, f the ParetoCeil pmf
    if (j <= 1) return 1.0;
    const double m = static_cast<double>(j + 1);
    return (m * std::pow(m - 1.0, 1.0 - tau_) + hurwitz_zeta(tau_ - 1.0, m)) / mu_;
}

OffspringLaw OffspringLaw::pareto_ceil(double tau) {
    OffspringLaw g;
    g.kind_ = Kind::pareto_tail;
    g.tau_ = tau;
    g.mu_ = 1.0 + zeta(tau - 1.0);
    g.mean_ = tau > 3.0 ? 2.0 * zeta(tau - 2.0) / g.mu_
                        : std::numeric_limits<double>::infinity();

    // table up to the point where the exact tail drops below 1e-10 (capped)
    std::int64_t hi = 2;
    while (hi < kMaxTable && g.pareto_tail_survival(hi + 1) > 1e-10) hi *= 2;
    std::int64_t lo = hi / 2;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (g.pareto_tail_survival(mid + 1) > 1e-10) lo = mid + 1; else hi = mid;
    }
    const std::int64_t table = std::min<std::int64_t>(lo + 1, kMaxTable);

    g.cdf_.resize(static_cast<std::size_t>(table));
    double acc = 0.0;
    for (std::int64_t j = 0; j + 1 < table; ++j) {
        acc += g.pmf(j);
        g.cdf_[static_cast<std::size_t>(j)] = std::min(acc, 1.0);
    }
    g.cdf_.back() = 1.0 - g.pareto_tail_survival(table); // anchor to exact survival
    if (g.cdf_.size() >= 2) g.cdf_.back() = std::max(g.cdf_.back(), g.cdf_[g.cdf_.size() - 2]);
    g.tail_mass_ = 1.0 - g.cdf_.back();
    return g;
}

double OffspringLaw::pmf(std::int64_t j) const {
    if (j < 0) return 0.0;
    switch (kind_) {
    case Kind::point_mass:
        return j == point_ ? 1.0 : 0.0;
    case Kind::geometric_shifted:
        return j >= 1 ? p_ * std::pow(1.0 - p_, static_cast<double>(j - 1)) : 0.0;
    case Kind::table:
        return j < static_cast<std::int64_t>(probs_.size()) ? probs_[static_cast<std::size_t>(j)] : 0.0;
    case Kind::pareto_tail: {
        // g_j = (j+1) f_{j+1} / mu with f_{j+1} = j^{1-tau} - (j+1)^{1-tau}
        if (j < 1) return 0.0;
        const double jj = static_cast<double>(j);
        return (jj + 1.0) * (std::pow(jj, 1.0 - tau_) - std::pow(jj + 1.0, 1.0 - tau_)) / mu_;
    }
    }
    return 0.0;
}

double OffspringLaw::cdf(std::int64_t j) const {
    if (j < 0) return 0.0;
    switch (kind_) {
    case Kind::point_mass:
        return j >= point_ ? 1.0 : 0.0;
    case Kind::geometric_shifted:
        return 1.0 - std::pow(1.0 - p_, static_cast<double>(j));
    case Kind::table:
        if (cdf_.empty()) return 1.0;
        return j < static_cast<std::int64_t>(cdf_.size()) ? cdf_[static_cast<std::size_t>(j)]
                                                          : cdf_.back();
    case Kind::pareto_tail:
        if (j < static_cast<std::int64_t>(cdf_.size())) return cdf_[static_cast<std::size_t>(j)];
        return 1.0 - pareto_tail_survival(j + 1);
    }
    return 1.0;
}

double OffspringLaw::generating_fn(double s) const {
    switch (kind_) {
    case Kind::point_mass:
        return std::pow(s, static_cast<double>(point_));
    case Kind::geometric_shifted:
        return p_ * s / (1.0 - (1.0 - p_) * s);
    case Kind::table:
    case Kind::pareto_tail: {
        double sum = 0.0;
        double sp = 1.0;
        const std::int64_t n = table_size();
        for (std::int64_t j = 0; j < n; ++j) {
            sum += pmf(j) * sp;
            const double remaining = 1.0 - cdf_[static_cast<std::size_t>(j)];
            sp *= s;
            if (remaining * sp < 1e-16) break;
        }
        return sum;
    }
    }
    return 0.0;
}

namespace {

using cplx = std::complex<double>;

// I_beta(A) = integral_A^inf x^-beta e^{lambda x} dx, Re(lambda) <= 0, via the
// integration-by-parts series; needs |lambda| A large enough that the terms
// shrink (caller guarantees |lambda| A >= ~20)
cplx power_exp_integral(double beta, double a, cplx lambda) {
    const cplx head = -std::exp(lambda * a) / lambda;
    cplx term = head * std::pow(a, -beta);
    cplx sum = term;
    double prev = std::abs(term);
    for (int m = 0; m < 24; ++m) {
        term *= (beta + static_cast<double>(m)) / (lambda * a);
        const double mag = std::abs(term);
        if (mag >= prev) break; // asymptotic series: stop at the smallest term
        sum += term;
        prev = mag;
    }
    return sum;
}

} // namespace

cplx OffspringLaw::generating_fn(cplx z) const {
    switch (kind_) {
    case Kind::point_mass: {
        cplx r(1.0);
        if (point_ <= 64) {
            for (std::int64_t i = 0; i < point_; ++i) r *= z;
            return r;
        }
        return std::pow(z, static_cast<double>(point_));
    }
    case Kind::geometric_shifted:
        return p_ * z / (1.0 - (1.0 - p_) * z);
    case Kind::table: {
        cplx sum(0.0);
        cplx zp(1.0);
        double zmag = 1.0;
        const double r = std::abs(z);
        for (std::size_t j = 0; j < probs_.size(); ++j) {
            sum += probs_[j] * zp;
            zp *= z;
            zmag *= r;
            if ((1.0 - cdf_[j]) * zmag < 1e-15) break;
        }
        return sum;
    }
    case Kind::pareto_tail:
        break;
    }

    // ParetoCeil offspring. Away from z = 1 the plain coefficient sum exits
    // quickly and its truncation error (<= declared tail mass) is harmless.
    const cplx lambda = std::log(z);
    if (std::abs(lambda) >= 0.7) {
        cplx sum(0.0);
        cplx zp(1.0);
        double zmag = 1.0;
        const double r = std::abs(z);
        const std::int64_t n = table_size();
        for (std::int64_t j = 0; j < n; ++j) {
            sum += pmf(j) * zp;
            zp *= z;
            zmag *= r;
            if ((1.0 - cdf_[static_cast<std::size_t>(j)]) * zmag < 1e-14) break;
        }
        return sum;
    }

    // Near z = 1 use G(z) = 1 + (1 - 1/z) H(z) with H(z) = sum_{j>=1} S(j) z^j,
    // S(j) = P(offspring >= j) exact from the anchored cdf. The head runs over
    // the stored table; the remainder uses the two-term expansion
    // S(x) ~ (c1 x^{2-tau} + x^{1-tau}/2) / mu integrated against e^{lambda x}.
    const std::int64_t head_n =
        std::min<std::int64_t>(table_size(), std::int64_t{1} << 17);
    cplx h(0.0);
    cplx zp = z;
    for (std::int64_t j = 1; j <= head_n; ++j) {
        h += (1.0 - cdf_[static_cast<std::size_t>(j - 1)]) * zp;
        zp *= z;
    }
    const double a = static_cast<double>(head_n) + 0.5;
    const double c1 = (tau_ - 1.0) / (tau_ - 2.0);
    h += (c1 * power_exp_integral(tau_ - 2.0, a, lambda) +
          0.5 * power_exp_integral(tau_ - 1.0, a, lambda)) /
         mu_;
    return 1.0 + (1.0 - 1.0 / z) * h;
}

std::optional<double> OffspringLaw::power_tail_index() const {
    if (kind_ == Kind::pareto_tail) return tau_ - 2.0;
    return std::nullopt;
}

std::int64_t OffspringLaw::search_cdf(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::int64_t>(it - cdf_.begin());
}

std::int64_t OffspringLaw::sample_pareto_tail(double v) const {
    // conditional draw beyond the table: find j with S(j) > u' >= S(j+1)
    const std::int64_t table = table_size();
    const double u = pareto_tail_survival(table) * v;
    std::int64_t lo = table, hi = table;
    while (pareto_tail_survival(hi + 1) > u && hi < (std::int64_t{1} << 60)) {
        lo = hi + 1;
        hi = 2 * hi;
    }
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (pareto_tail_survival(mid + 1) > u) lo = mid + 1; else hi = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// DegreeLaw

DegreeLaw DegreeLaw::pareto_ceil(double tau) {
    if (!(tau > 2.0)) throw std::invalid_argument("pareto_ceil: requires tau > 2");
    DegreeLaw law;
    law.family_ = Family::pareto_ceil;
    law.tau_ = tau;
    return law;
}

DegreeLaw DegreeLaw::regular(std::int64_t r) {
    if (r < 1) throw std::invalid_argument("regular: requires r >= 1");
    DegreeLaw law;
    law.family_ = Family::regular;
    law.r_ = r;
    return law;
}

DegreeLaw DegreeLaw::geometric_size_biased(double p) {
    if (!(p > 0.5 && p < 1.0))
        throw std::invalid_argument("geometric_size_biased: requires p in (1/2, 1)");
    DegreeLaw law;
    law.family_ = Family::geometric_size_biased;
    law.p_ = p;
    // c_p = sum_{j>=2} p (1-p)^{j-2} / j, summed with a geometric tail bound
    double c = 0.0;
    double t = p / 2.0; // j = 2 term
    std::int64_t j = 2;
    for (;;) {
        c += t;
        const double next = t * (1.0 - p) * static_cast<double>(j) / static_cast<double>(j + 1);
        if (next / p < 1e-18 * c) break;
        t = next;
        ++j;
        if (j > kMaxTable) break;
    }
    law.c_p_ = c;
    law.build_sampling_table();
    return law;
}

DegreeLaw DegreeLaw::power_law_cutoff(double gamma, double kappa_cut) {
    if (!(kappa_cut > 0.0)) throw std::invalid_argument("power_law_cutoff: requires kappa_cut > 0");
    DegreeLaw law;
    law.family_ = Family::power_law_cutoff;
    law.gamma_ = gamma;
    law.kappa_cut_ = kappa_cut;

    // unnormalized weights until both the mass and the k^2-weighted tails are
    // certified negligible
    std::vector<double> w{0.0}; // k = 0
    double sum = 0.0;
    for (std::int64_t k = 1;; ++k) {
        const double kk = static_cast<double>(k);
        const double t = std::pow(kk, -gamma) * std::exp(-kk / kappa_cut);
        w.push_back(t);
        sum += t;
        const double ratio = std::exp(-1.0 / kappa_cut) *
                             std::pow((kk + 1.0) / kk, std::max(2.0 - gamma, 0.0));
        if (ratio < 1.0) {
            const double tail_bound = t * kk * kk * ratio / (1.0 - ratio);
            if (tail_bound < kMomentTail * sum && k > 4) break;
        }
        if (k >= kMaxTable)
            throw std::invalid_argument("power_law_cutoff: table cap exceeded (kappa_cut too large)");
    }
    law.cutoff_norm_ = 1.0 / sum;
    law.probs_.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) law.probs_[k] = w[k] * law.cutoff_norm_;
    law.build_sampling_table();
    return law;
}

DegreeLaw DegreeLaw::empirical(std::vector<double> probs) {
    if (probs.empty()) throw std::invalid_argument("empirical: empty pmf");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("empirical: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("empirical: probabilities sum to " + format_real(sum));
    DegreeLaw law;
    law.family_ = Family::empirical;
    law.probs_ = std::move(probs);
    law.build_sampling_table();
    return law;
}

void DegreeLaw::build_sampling_table() {
    switch (family_) {
    case Family::geometric_size_biased: {
        cdf_.assign(2, 0.0); // f_0 = f_1 = 0
        double acc = 0.0;
        for (std::int64_t j = 2;; ++j) {
            acc += pmf(j);
            cdf_.push_back(std::min(acc, 1.0));
            const double tail = std::pow(1.0 - p_, static_cast<double>(j - 1)) / c_p_;
            if (tail < kTableTail) break;
        }
        table_tail_ = 1.0 - cdf_.back();
        break;
    }
    case Family::power_law_cutoff:
    case Family::empirical: {
        cdf_.resize(probs_.size());
        double acc = 0.0;
        for (std::size_t j = 0; j < probs_.size(); ++j) {
            acc += probs_[j];
            cdf_[j] = std::min(acc, 1.0);
        }
        table_tail_ = 1.0 - cdf_.back();
        break;
    }
    default:
        break;
    }
}

std::string DegreeLaw::name() const {
    switch (family_) {
    case Family::pareto_ceil: return "pareto_ceil";
    case Family::regular: return "regular";
    case Family::geometric_size_biased: return "geometric_size_biased";
    case Family::power_law_cutoff: return "power_law_cutoff";
    case Family::empirical: return "empirical";
    }
    return "?";
}

double DegreeLaw::pmf(std::int64_t j) const {
    if (j < 0) return 0.0;
    switch (family_) {
    case Family::pareto_ceil: {
        if (j <= 1) return 0.0;
        const double jj = static_cast<double>(j);
        return std::pow(jj - 1.0, 1.0 - tau_) - std::pow(jj, 1.0 - tau_);
    }
    case Family::regular:
        return j == r_ ? 1.0 : 0.0;
    case Family::geometric_size_biased:
        if (j < 2) return 0.0;
        return p_ * std::pow(1.0 - p_, static_cast<double>(j - 2)) / (static_cast<double>(j) * c_p_);
    case Family::power_law_cutoff:
        if (j == 0) return 0.0;
        if (j < static_cast<std::int64_t>(probs_.size())) return probs_[static_cast<std::size_t>(j)];
        return cutoff_norm_ * std::pow(static_cast<double>(j), -gamma_) *
               std::exp(-static_cast<double>(j) / kappa_cut_);
    case Family::empirical:
        return j < static_cast<std::int64_t>(probs_.size()) ? probs_[static_cast<std::size_t>(j)] : 0.0;
    }
    return 0.0;
}

double DegreeLaw::cdf(std::int64_t j) const {
    if (j < 0) return 0.0;
    switch (family_) {
    case Family::pareto_ceil:
        if (j < 1) return 0.0;
        return 1.0 - std::pow(static_cast<double>(j), 1.0 - tau_);
    case Family::regular:
        return j >= r_ ? 1.0 : 0.0;
    default:
        if (cdf_.empty()) return 0.0;
        if (j >= static_cast<std::int64_t>(cdf_.size())) return cdf_.back() + table_tail_;
        return cdf_[static_cast<std::size_t>(j)];
    }
}

std::int64_t DegreeLaw::sample_table(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return static_cast<std::int64_t>(cdf_.size()) - 1;
    return static_cast<std::int64_t>(it - cdf_.begin());
}

MomentSummary DegreeLaw::moments() const {
    MomentSummary m;
    switch (family_) {
    case Family::pareto_ceil: {
        if (tau_ <= 3.0)
            throw NuDivergesError("pareto_ceil: nu diverges for tau <= 3");
        m.mu = 1.0 + zeta(tau_ - 1.0);
        m.nu = 2.0 * zeta(tau_ - 2.0) / m.mu;
        break;
    }
    case Family::regular:
        m.mu = static_cast<double>(r_);
        m.nu = static_cast<double>(r_ - 1);
        break;
    case Family::geometric_size_biased:
        m.mu = 1.0 / c_p_;
        m.nu = 1.0 / p_;
        break;
    case Family::power_law_cutoff:
    case Family::empirical: {
        double mu = 0.0, fact2 = 0.0;
        for (std::size_t j = 1; j < probs_.size(); ++j) {
            const double jj = static_cast<double>(j);
            mu += jj * probs_[j];
            fact2 += jj * (jj - 1.0) * probs_[j];
        }
        if (mu <= 0.0) throw std::invalid_argument("moments: law has mu = 0");
        m.mu = mu;
        m.nu = fact2 / mu;
        break;
    }
    }
    m.supercritical = m.nu > 1.0;
    m.kappa = m.supercritical ? m.mu / (m.nu - 1.0) : 0.0;
    return m;
}

OffspringLaw DegreeLaw::size_biased_offspring() const {
    switch (family_) {
    case Family::regular:
        return OffspringLaw::point_mass(r_ - 1, static_cast<double>(r_ - 1));
    case Family::pareto_ceil:
        if (tau_ <= 3.0)
            throw NuDivergesError("size_biased_offspring: offspring mean diverges for tau <= 3");
        return OffspringLaw::pareto_ceil(tau_);
    case Family::geometric_size_biased:
        return OffspringLaw::geometric_shifted(p_);
    case Family::power_law_cutoff:
    case Family::empirical: {
        const MomentSummary m = moments();
        std::vector<double> g(probs_.size() > 0 ? probs_.size() - 1 : 0, 0.0);
        double mass = 0.0;
        for (std::size_t j = 0; j + 1 < probs_.size(); ++j) {
            g[j] = (static_cast<double>(j) + 1.0) * probs_[j + 1] / m.mu;
            mass += g[j];
        }
        const double tail = family_ == Family::empirical
                                ? std::max(0.0, 1.0 - mass)
                                : degree_weight_tail_bound(static_cast<std::int64_t>(probs_.size())) / m.mu;
        return OffspringLaw::from_table(std::move(g), tail, m.nu);
    }
    }
    throw std::logic_error("unreachable");
}

double DegreeLaw::degree_weight_tail_bound(std::int64_t m) const {
    switch (family_) {
    case Family::regular:
        return m <= r_ ? static_cast<double>(r_) : 0.0;
    case Family::pareto_ceil: {
        if (m <= 2) return 1.0 + zeta(tau_ - 1.0);
        const double md = static_cast<double>(m);
        return md * std::pow(md - 1.0, 1.0 - tau_) + hurwitz_zeta(tau_ - 1.0, md);
    }
    case Family::geometric_size_biased:
        if (m <= 2) return 1.0 / c_p_;
        return std::pow(1.0 - p_, static_cast<double>(m - 2)) / c_p_;
    case Family::empirical: {
        double s = 0.0;
        for (std::size_t j = static_cast<std::size_t>(std::max<std::int64_t>(m, 0));
             j < probs_.size(); ++j)
            s += static_cast<double>(j) * probs_[j];
        return s;
    }
    case Family::power_law_cutoff: {
        double s = 0.0;
        for (std::size_t j = static_cast<std::size_t>(std::max<std::int64_t>(m, 1));
             j < probs_.size(); ++j)
            s += static_cast<double>(j) * probs_[j];
        // geometric bound on the part beyond the table
        const double k = static_cast<double>(probs_.size());
        const double t = k * pmf(static_cast<std::int64_t>(k));
        const double ratio = std::exp(-1.0 / kappa_cut_) *
                             std::pow((k + 1.0) / k, std::max(1.0 - gamma_, 0.0));
        if (ratio < 1.0) s += t / (1.0 - ratio);
        return s;
    }
    }
    return 0.0;
}

std::map<std::string, std::string> DegreeLaw::to_config() const {
    std::map<std::string, std::string> kv;
    kv["family"] = name();
    switch (family_) {
    case Family::pareto_ceil: kv["tau"] = format_real(tau_); break;
    case Family::regular: kv["r"] = std::to_string(r_); break;
    case Family::geometric_size_biased: kv["p"] = format_real(p_); break;
    case Family::power_law_cutoff:
        kv["gamma"] = format_real(gamma_);
        kv["kappa_cut"] = format_real(kappa_cut_);
        break;
    case Family::empirical: {
        std::ostringstream os;
        os.precision(17);
        for (std::size_t j = 0; j < probs_.size(); ++j) {
            if (j) os << ",";
            os << probs_[j];
        }
        kv["probs"] = os.str();
        break;
    }
    }
    return kv;
}

DegreeLaw DegreeLaw::from_config(const std::map<std::string, std::string>& kv) {
    auto it = kv.find("family");
    if (it == kv.end()) throw std::invalid_argument("degree law config: missing 'family'");
    const std::string& fam = it->second;
    if (fam == "pareto_ceil") return pareto_ceil(parse_real(kv, "tau"));
    if (fam == "regular") return regular(static_cast<std::int64_t>(parse_real(kv, "r")));
    if (fam == "geometric_size_biased") return geometric_size_biased(parse_real(kv, "p"));
    if (fam == "power_law_cutoff")
        return power_law_cutoff(parse_real(kv, "gamma"), parse_real(kv, "kappa_cut"));
    if (fam == "empirical") {
        auto ps = kv.find("probs");
        if (ps == kv.end()) throw std::invalid_argument("degree law config: missing 'probs'");
        std::vector<double> probs;
        std::stringstream ss(ps->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) probs.push_back(std::stod(tok));
        return empirical(std::move(probs));
    }
    throw std::invalid_argument("degree law config: unknown family '" + fam + "'");
}

} // namespace cfgdist
