#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfgdist/math_util.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist {

struct MomentSummary {
    double mu    = 0.0;  // E[D]
    double nu    = 0.0;  // E[D(D-1)] / E[D]
    double kappa = 0.0;  // mu / (nu - 1), only meaningful when supercritical
    bool supercritical = false;
};

class NuDivergesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Forward-degree law of the node reached over a uniformly chosen stub:
// g_j = (j+1) f_{j+1} / mu. Closed-form families sample exactly; table-backed
// families carry a certified tail bound. `mean()` is the certified value, not
// the truncated sum.
class OffspringLaw {
public:
    enum class Kind { point_mass, geometric_shifted, table, pareto_tail };

    double pmf(std::int64_t j) const;
    double cdf(std::int64_t j) const; // P(offspring <= j)
    double mean() const { return mean_; }
    double tail_mass() const { return tail_mass_; }
    std::int64_t table_size() const { return static_cast<std::int64_t>(cdf_.size()); }

    // generating function at real s in [0,1] (truncated families: error <= tail mass)
    double generating_fn(double s) const;

    // generating function at complex z, |z| <= 1. The heavy-tailed family
    // switches to an exact-survival head plus an asymptotic integral tail when
    // z is close to 1, where coefficient truncation would be fatal.
    std::complex<double> generating_fn(std::complex<double> z) const;

    // tail exponent alpha with P(offspring > x) ~ c x^{-alpha}, when power-like
    std::optional<double> power_tail_index() const;

    template <uniform_source R>
    std::int64_t sample(R& rng) const {
        switch (kind_) {
        case Kind::point_mass:
            return point_;
        case Kind::geometric_shifted: {
            // g_j = p (1-p)^{j-1}, j >= 1
            const double u = rng.next_u01_open();
            return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / log1mp_));
        }
        case Kind::table:
        case Kind::pareto_tail: {
            const double u = rng.next_u01();
            if (u < cdf_.back()) return search_cdf(u);
            if (kind_ == Kind::table) return static_cast<std::int64_t>(cdf_.size()) - 1;
            return sample_pareto_tail(rng.next_u01_open());
        }
        }
        return 0;
    }

    static OffspringLaw point_mass(std::int64_t j, double mean);
    static OffspringLaw geometric_shifted(double p);
    static OffspringLaw from_table(std::vector<double> probs, double tail_mass, double mean);
    static OffspringLaw pareto_ceil(double tau);

private:
    std::int64_t search_cdf(double u) const;
    std::int64_t sample_pareto_tail(double v) const;
    double pareto_tail_survival(std::int64_t j) const; // P(offspring >= j), exact

    Kind kind_ = Kind::point_mass;
    std::int64_t point_ = 0;
    double p_ = 0.0, log1mp_ = 0.0; // geometric_shifted
    double tau_ = 0.0, mu_ = 0.0;   // pareto_tail
    std::vector<double> probs_;
    std::vector<double> cdf_; // cdf_[j] = P(offspring <= j)
    double tail_mass_ = 0.0;
    double mean_ = 0.0;
};

// Degree distribution of a single node. Immutable after construction; sampling
// takes a caller-owned stream.
class DegreeLaw {
public:
    enum class Family { pareto_ceil, regular, geometric_size_biased, power_law_cutoff, empirical };

    // D = ceil(U^{-1/(tau-1)}), i.e. 1 - F(k) = k^{1-tau} for integer k >= 1.
    static DegreeLaw pareto_ceil(double tau);
    static DegreeLaw regular(std::int64_t r);
    // f_j proportional to p (1-p)^{j-2} / j on j >= 2; its offspring law is the
    // plain geometric g_j = p (1-p)^{j-1}, j >= 1, with mean 1/p.
    static DegreeLaw geometric_size_biased(double p);
    // f_k = C k^-gamma exp(-k/kappa_cut), k >= 1.
    static DegreeLaw power_law_cutoff(double gamma, double kappa_cut);
    static DegreeLaw empirical(std::vector<double> probs);

    Family family() const { return family_; }
    std::string name() const;

    double pmf(std::int64_t j) const;
    double cdf(std::int64_t j) const; // F(j) = P(D <= j)

    // Throws NuDivergesError when E[D^2] is infinite (ParetoCeil with tau <= 3).
    MomentSummary moments() const;

    OffspringLaw size_biased_offspring() const;

    template <uniform_source R>
    std::int64_t sample(R& rng) const {
        switch (family_) {
        case Family::regular:
            return r_;
        case Family::pareto_ceil: {
            const double u = rng.next_u01_open();
            const double v = std::pow(u, -1.0 / (tau_ - 1.0));
            return static_cast<std::int64_t>(std::ceil(v));
        }
        default: {
            const double u = rng.next_u01();
            return sample_table(u);
        }
        }
    }

    // "name + named parameters" round trip, e.g. "pareto_ceil" + {tau: 3.5}
    std::map<std::string, std::string> to_config() const;
    static DegreeLaw from_config(const std::map<std::string, std::string>& kv);

    // Upper bound on sum_{j >= m} j f_j; used to certify offspring truncations.
    double degree_weight_tail_bound(std::int64_t m) const;

private:
    DegreeLaw() = default;
    void build_sampling_table();
    std::int64_t sample_table(double u) const;

    Family family_ = Family::regular;
    double tau_ = 0.0;            // pareto_ceil
    std::int64_t r_ = 0;          // regular
    double p_ = 0.0, c_p_ = 0.0;  // geometric_size_biased
    double gamma_ = 0.0, kappa_cut_ = 0.0, cutoff_norm_ = 0.0;
    std::vector<double> probs_;   // empirical, and cached pmf for cutoff
    std::vector<double> cdf_;     // sampling table (families without closed inverse)
    double table_tail_ = 0.0;
};

} // namespace cfgdist
