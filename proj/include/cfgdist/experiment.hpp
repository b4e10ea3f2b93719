#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfgdist/bp.hpp"
#include "cfgdist/degree_law.hpp"
#include "cfgdist/degree_sequence.hpp"
#include "cfgdist/spg.hpp"
#include "cfgdist/stats.hpp"
#include "cfgdist/stub_graph.hpp"

namespace cfgdist {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RunMode { hopcount, components, bp_w, limit_law, coupling_diagnostics, fig1, fig2 };

std::string to_string(RunMode mode);
RunMode parse_mode(const std::string& name);

struct ExperimentConfig {
    std::map<std::string, std::string> law_kv = {{"family", "pareto_ceil"}, {"tau", "3.5"}};
    std::vector<std::int64_t> n_values;
    std::int64_t replications = 1000;
    std::uint64_t seed = 1;
    RunMode mode = RunMode::hopcount;
    std::string out_dir = "out";
    double trunc_eps = 0.05;
    double eps_prime = 0.1; // well-behavedness tolerance
    Conditioning conditioning = Conditioning::finite_only;
    int threads = 0;         // 0: OpenMP default
    bool oracle_bfs = false; // full-graph BFS instead of bilateral growth
    int w_depth = 0;         // 0: default_w_depth(nu)
    std::int64_t w_samples = 10000;

    DegreeLaw law() const;
    void validate() const; // throws ConfigError

    static ExperimentConfig defaults_for(RunMode mode);
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// Replication kernels. The serial variants are the reference implementations;
// the parallel ones split replications across OpenMP threads with streams
// derived from (seed, N, replication), so both produce identical vectors.

std::vector<std::int64_t> sample_hopcounts_serial(const DegreeLaw& law, std::int64_t n,
                                                  std::int64_t reps, std::uint64_t seed,
                                                  bool oracle_bfs = false);
std::vector<std::int64_t> sample_hopcounts_parallel(const DegreeLaw& law, std::int64_t n,
                                                    std::int64_t reps, std::uint64_t seed,
                                                    bool oracle_bfs = false, int threads = 0);

std::vector<double> sample_w_values_serial(const DegreeLaw& f, const OffspringLaw& g, int depth,
                                           std::int64_t samples, std::uint64_t seed,
                                           std::uint64_t salt = 0);
std::vector<double> sample_w_values_parallel(const DegreeLaw& f, const OffspringLaw& g, int depth,
                                             std::int64_t samples, std::uint64_t seed,
                                             std::uint64_t salt = 0, int threads = 0);

struct ComponentRecord {
    ComponentSummary full;
    ComponentSummary truncated;
    std::int64_t removed_edges = 0;
    std::int64_t degree_cap = 0;
    double nu_n = 0.0;
};

std::vector<ComponentRecord> component_replications_serial(const DegreeLaw& law, std::int64_t n,
                                                           std::int64_t reps, std::uint64_t seed,
                                                           double eps);
std::vector<ComponentRecord> component_replications_parallel(const DegreeLaw& law, std::int64_t n,
                                                             std::int64_t reps, std::uint64_t seed,
                                                             double eps, int threads = 0);

struct DiagnosticsRecord {
    double l_ratio_dev = 0.0; // L_N / (mu N) - 1
    double p_n = 0.0;
    double nu_dev = 0.0; // |nu_N - nu|
    std::optional<int> miscoupling_generation;
    WellBehavedReport well_behaved;
};

std::vector<DiagnosticsRecord> diagnostics_replications_serial(const DegreeLaw& law, std::int64_t n,
                                                               std::int64_t reps,
                                                               std::uint64_t seed, int m_max,
                                                               double eps_prime, double cap_eps);
std::vector<DiagnosticsRecord> diagnostics_replications_parallel(const DegreeLaw& law,
                                                                 std::int64_t n, std::int64_t reps,
                                                                 std::uint64_t seed, int m_max,
                                                                 double eps_prime, double cap_eps,
                                                                 int threads = 0);

// W pairs for the limit law: two independent banks of samples.
std::vector<WPair> sample_w_pairs(const DegreeLaw& f, const OffspringLaw& g, int depth,
                                  std::int64_t pairs, std::uint64_t seed, int threads = 0);

// ---------------------------------------------------------------------------
// Drivers: run one mode end to end, write CSVs plus manifest.json into
// cfg.out_dir, and return the manifest as a JSON string.

std::string run_experiment(const ExperimentConfig& cfg);

// deterministic CSV helpers (also used by tests)
void write_survival_csv(std::ostream& out, const SurvivalCurve& curve);
void write_components_csv(std::ostream& out, const ComponentSummary& summary);
std::string format_double(double v);

} // namespace cfgdist
