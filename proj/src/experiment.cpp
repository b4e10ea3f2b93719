#include "cfgdist/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfgdist {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// stream purposes; replication streams are keyed by (seed, N, rep, purpose)
enum Purpose : std::uint64_t {
    kDegrees = 1,
    kGrowth = 2,
    kTruncation = 3,
    kCoupling = 4,
    kBp = 5,
};

RandomStream rep_stream(std::uint64_t seed, std::uint64_t n, std::uint64_t rep,
                        std::uint64_t purpose) {
    return RandomStream(seed, derive_stream_id({n, rep, purpose}));
}

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::hopcount: return "hopcount";
    case RunMode::components: return "components";
    case RunMode::bp_w: return "bp-w";
    case RunMode::limit_law: return "limit-law";
    case RunMode::coupling_diagnostics: return "coupling-diagnostics";
    case RunMode::fig1: return "fig1";
    case RunMode::fig2: return "fig2";
    }
    return "?";
}

RunMode parse_mode(const std::string& name) {
    if (name == "hopcount") return RunMode::hopcount;
    if (name == "components") return RunMode::components;
    if (name == "bp-w") return RunMode::bp_w;
    if (name == "limit-law") return RunMode::limit_law;
    if (name == "coupling-diagnostics") return RunMode::coupling_diagnostics;
    if (name == "fig1") return RunMode::fig1;
    if (name == "fig2") return RunMode::fig2;
    throw ConfigError("unknown mode '" + name + "'");
}

DegreeLaw ExperimentConfig::law() const {
    try {
        return DegreeLaw::from_config(law_kv);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("law: ") + e.what());
    }
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (n_values.empty() && mode != RunMode::bp_w) throw ConfigError("no N values given");
    for (std::int64_t n : n_values)
        if (n < 2) throw ConfigError("N values must be >= 2");
    if (!(trunc_eps > 0.0 && trunc_eps < 0.25)) throw ConfigError("eps must be in (0, 1/4)");
    if (w_samples < 1) throw ConfigError("w_samples must be >= 1");
    if (w_depth < 0) throw ConfigError("w_depth must be >= 0");
    law(); // throws ConfigError on bad law parameters
}

ExperimentConfig ExperimentConfig::defaults_for(RunMode mode) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    switch (mode) {
    case RunMode::fig1:
        cfg.n_values = {25000, 75000, 125000};
        cfg.replications = 1000;
        break;
    case RunMode::fig2:
        cfg.n_values = {5000, 25000, 125000, 625000};
        cfg.replications = 1000;
        break;
    case RunMode::hopcount:
        cfg.n_values = {10000};
        cfg.replications = 1000;
        break;
    case RunMode::components:
        cfg.n_values = {100000};
        cfg.replications = 50;
        break;
    case RunMode::coupling_diagnostics:
        cfg.n_values = {100000};
        cfg.replications = 100;
        break;
    case RunMode::bp_w:
    case RunMode::limit_law:
        cfg.n_values = {25000};
        cfg.replications = 1;
        break;
    }
    return cfg;
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool mode_seen = false;
    std::string line, section;
    std::map<std::string, std::string> run_kv;
    cfg.law_kv.clear();
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section != "law" && section != "run")
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section == "law") {
            cfg.law_kv[key] = value;
        } else if (section == "run") {
            run_kv[key] = value;
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
        }
    }
    if (cfg.law_kv.empty()) cfg.law_kv = {{"family", "pareto_ceil"}, {"tau", "3.5"}};

    for (const auto& [key, value] : run_kv) {
        try {
            if (key == "mode") {
                cfg.mode = parse_mode(value);
                mode_seen = true;
            } else if (key == "n") {
                cfg.n_values.clear();
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    cfg.n_values.push_back(std::stoll(trim(tok)));
            } else if (key == "replications") {
                cfg.replications = std::stoll(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "out") {
                cfg.out_dir = value;
            } else if (key == "eps") {
                cfg.trunc_eps = std::stod(value);
            } else if (key == "eps_prime") {
                cfg.eps_prime = std::stod(value);
            } else if (key == "conditioning") {
                if (value == "finite-only") cfg.conditioning = Conditioning::finite_only;
                else if (value == "unconditional") cfg.conditioning = Conditioning::unconditional;
                else throw ConfigError("conditioning must be finite-only or unconditional");
            } else if (key == "threads") {
                cfg.threads = std::stoi(value);
            } else if (key == "oracle_bfs") {
                if (value == "true" || value == "1") cfg.oracle_bfs = true;
                else if (value == "false" || value == "0") cfg.oracle_bfs = false;
                else throw ConfigError("oracle_bfs must be true or false");
            } else if (key == "w_depth") {
                cfg.w_depth = std::stoi(value);
            } else if (key == "w_samples") {
                cfg.w_samples = std::stoll(value);
            } else {
                throw ConfigError("unknown run key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("invalid value for run key '" + key + "': " + value);
        }
    }
    if (mode_seen && cfg.n_values.empty())
        cfg.n_values = ExperimentConfig::defaults_for(cfg.mode).n_values;
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

// ---------------------------------------------------------------------------
// kernels

namespace {

std::int64_t one_hopcount(const DegreeLaw& law, std::int64_t n, std::uint64_t seed,
                          std::uint64_t rep, bool oracle_bfs) {
    RandomStream deg = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kDegrees);
    const DegreeSequence seq = sample_degree_sequence(law, n, deg);
    RandomStream growth = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kGrowth);
    if (oracle_bfs) {
        const StubGraph g = pair_stubs(seq, growth);
        return hopcount(g, 0, 1);
    }
    return bilateral_hopcount(seq, 0, 1, growth);
}

template <class T, class Fn>
std::vector<T> run_reps_serial(std::int64_t reps, Fn&& one) {
    std::vector<T> out(static_cast<std::size_t>(reps));
    for (std::int64_t r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = one(r);
    return out;
}

template <class T, class Fn>
std::vector<T> run_reps_parallel(std::int64_t reps, int threads, Fn&& one) {
    std::vector<T> out(static_cast<std::size_t>(reps));
    const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
    for (std::int64_t r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = one(r);
    return out;
}

} // namespace

std::vector<std::int64_t> sample_hopcounts_serial(const DegreeLaw& law, std::int64_t n,
                                                  std::int64_t reps, std::uint64_t seed,
                                                  bool oracle_bfs) {
    return run_reps_serial<std::int64_t>(
        reps, [&](std::int64_t r) { return one_hopcount(law, n, seed, r, oracle_bfs); });
}

std::vector<std::int64_t> sample_hopcounts_parallel(const DegreeLaw& law, std::int64_t n,
                                                    std::int64_t reps, std::uint64_t seed,
                                                    bool oracle_bfs, int threads) {
    return run_reps_parallel<std::int64_t>(
        reps, threads, [&](std::int64_t r) { return one_hopcount(law, n, seed, r, oracle_bfs); });
}

namespace {

double one_w_value(const DegreeLaw& f, const OffspringLaw& g, int depth, std::uint64_t seed,
                   std::uint64_t salt, std::uint64_t rep) {
    RandomStream rng(seed, derive_stream_id({salt, rep, kBp}));
    const double mu = f.moments().mu;
    const double nu = g.mean();
    const BPTrace t = simulate_delayed_bp(f, g, depth, kDefaultPopulationCap, rng);
    if (t.extinct) return 0.0;
    const int n = static_cast<int>(t.gen.size()) - 1;
    return static_cast<double>(t.gen.back()) / (mu * std::pow(nu, n - 1));
}

} // namespace

std::vector<double> sample_w_values_serial(const DegreeLaw& f, const OffspringLaw& g, int depth,
                                           std::int64_t samples, std::uint64_t seed,
                                           std::uint64_t salt) {
    return run_reps_serial<double>(
        samples, [&](std::int64_t r) { return one_w_value(f, g, depth, seed, salt, r); });
}

std::vector<double> sample_w_values_parallel(const DegreeLaw& f, const OffspringLaw& g, int depth,
                                             std::int64_t samples, std::uint64_t seed,
                                             std::uint64_t salt, int threads) {
    return run_reps_parallel<double>(
        samples, threads, [&](std::int64_t r) { return one_w_value(f, g, depth, seed, salt, r); });
}

std::vector<WPair> sample_w_pairs(const DegreeLaw& f, const OffspringLaw& g, int depth,
                                  std::int64_t pairs, std::uint64_t seed, int threads) {
    const auto w1 = sample_w_values_parallel(f, g, depth, pairs, seed, 101, threads);
    const auto w2 = sample_w_values_parallel(f, g, depth, pairs, seed, 202, threads);
    std::vector<WPair> out(w1.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {w1[i], w2[i]};
    return out;
}

namespace {

ComponentRecord one_component_record(const DegreeLaw& law, std::int64_t n, std::uint64_t seed,
                                     std::uint64_t rep, double eps) {
    RandomStream deg = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kDegrees);
    const DegreeSequence seq = sample_degree_sequence(law, n, deg);
    RandomStream pairing = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kGrowth);
    const StubGraph g = pair_stubs(seq, pairing);

    ComponentRecord rec;
    rec.full = components(g);
    double nu_n = 0.0;
    {
        const auto counts = degree_counts(seq);
        const double l = static_cast<double>(seq.total_stubs());
        for (std::size_t j = 1; j < counts.size(); ++j)
            nu_n += static_cast<double>(j) * (static_cast<double>(j) - 1.0) *
                    static_cast<double>(counts[j]) / l;
    }
    rec.nu_n = nu_n;
    RandomStream trunc = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kTruncation);
    TruncationResult tr = truncate_graph(g, eps, trunc);
    rec.truncated = components(tr.graph);
    rec.removed_edges = tr.removed_edges;
    rec.degree_cap = tr.degree_cap;
    return rec;
}

} // namespace

std::vector<ComponentRecord> component_replications_serial(const DegreeLaw& law, std::int64_t n,
                                                           std::int64_t reps, std::uint64_t seed,
                                                           double eps) {
    return run_reps_serial<ComponentRecord>(
        reps, [&](std::int64_t r) { return one_component_record(law, n, seed, r, eps); });
}

std::vector<ComponentRecord> component_replications_parallel(const DegreeLaw& law, std::int64_t n,
                                                             std::int64_t reps, std::uint64_t seed,
                                                             double eps, int threads) {
    return run_reps_parallel<ComponentRecord>(
        reps, threads, [&](std::int64_t r) { return one_component_record(law, n, seed, r, eps); });
}

namespace {

DiagnosticsRecord one_diagnostics_record(const DegreeLaw& law, const OffspringLaw& g_theory,
                                         const MomentSummary& m, std::int64_t n,
                                         std::uint64_t seed, std::uint64_t rep, int m_max,
                                         double eps_prime, double cap_eps) {
    RandomStream deg = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kDegrees);
    const DegreeSequence seq = sample_degree_sequence(law, n, deg);

    DiagnosticsRecord rec;
    rec.l_ratio_dev = static_cast<double>(seq.total_stubs()) /
                          (m.mu * static_cast<double>(seq.n())) - 1.0;
    const EmpiricalOffspring emp = empirical_offspring(seq, g_theory);
    rec.p_n = emp.p_n;
    rec.nu_dev = std::abs(emp.nu_n - m.nu);
    rec.well_behaved = check_well_behaved(seq, law, eps_prime, cap_eps);

    RandomStream coup = rep_stream(seed, static_cast<std::uint64_t>(n), rep, kCoupling);
    const CoupledTrace t = grow_coupled(seq, 0, m_max, coup);
    rec.miscoupling_generation = t.miscoupling_generation;
    return rec;
}

} // namespace

std::vector<DiagnosticsRecord> diagnostics_replications_serial(const DegreeLaw& law, std::int64_t n,
                                                               std::int64_t reps,
                                                               std::uint64_t seed, int m_max,
                                                               double eps_prime, double cap_eps) {
    const OffspringLaw g = law.size_biased_offspring();
    const MomentSummary m = law.moments();
    return run_reps_serial<DiagnosticsRecord>(reps, [&](std::int64_t r) {
        return one_diagnostics_record(law, g, m, n, seed, r, m_max, eps_prime, cap_eps);
    });
}

std::vector<DiagnosticsRecord> diagnostics_replications_parallel(
    const DegreeLaw& law, std::int64_t n, std::int64_t reps, std::uint64_t seed, int m_max,
    double eps_prime, double cap_eps, int threads) {
    const OffspringLaw g = law.size_biased_offspring();
    const MomentSummary m = law.moments();
    return run_reps_parallel<DiagnosticsRecord>(reps, threads, [&](std::int64_t r) {
        return one_diagnostics_record(law, g, m, n, seed, r, m_max, eps_prime, cap_eps);
    });
}

// ---------------------------------------------------------------------------
// output helpers

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_survival_csv(std::ostream& out, const SurvivalCurve& curve) {
    out << "k,survival,n\n";
    for (std::int64_t k = curve.k_min; k <= curve.k_max(); ++k)
        out << k << ',' << format_double(curve.eval(k)) << ',' << curve.sample_count << '\n';
}

void write_components_csv(std::ostream& out, const ComponentSummary& summary) {
    out << "rank,size\n";
    for (std::size_t i = 0; i < summary.sizes.size(); ++i)
        out << (i + 1) << ',' << summary.sizes[i] << '\n';
}

// ---------------------------------------------------------------------------
// drivers

namespace {

struct RunContext {
    const ExperimentConfig& cfg;
    DegreeLaw law;
    ordered_json manifest;
    std::vector<std::string> files;
    std::optional<ExtinctionResult> ext_cache;

    const ExtinctionResult& extinction() {
        if (!ext_cache) ext_cache = extinction_probability(law, law.size_biased_offspring());
        return *ext_cache;
    }

    explicit RunContext(const ExperimentConfig& c) : cfg(c), law(c.law()) {
        fs::create_directories(cfg.out_dir);
        manifest["version"] = "0.1.0";
        manifest["mode"] = to_string(cfg.mode);
        ordered_json jc;
        jc["law"] = cfg.law_kv;
        jc["n"] = cfg.n_values;
        jc["replications"] = cfg.replications;
        jc["seed"] = cfg.seed;
        jc["eps"] = cfg.trunc_eps;
        jc["eps_prime"] = cfg.eps_prime;
        jc["conditioning"] =
            cfg.conditioning == Conditioning::finite_only ? "finite-only" : "unconditional";
        jc["oracle_bfs"] = cfg.oracle_bfs;
        jc["w_depth"] = cfg.w_depth;
        jc["w_samples"] = cfg.w_samples;
        manifest["config"] = std::move(jc);
    }

    std::ofstream open(const std::string& name) {
        files.push_back(name);
        std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + name);
        return out;
    }

    std::string finish(double wall_seconds) {
        manifest["files"] = files;
        manifest["wall_time_s"] = wall_seconds;
        std::ofstream out(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
        const std::string text = manifest.dump(2) + "\n";
        out << text;
        return text;
    }
};

ordered_json per_n_summary(RunContext& ctx, std::int64_t n) {
    const MomentSummary m = ctx.law.moments();
    ordered_json j;
    j["n"] = n;
    j["mu"] = m.mu;
    j["nu"] = m.nu;
    if (m.supercritical) {
        const CenteringInfo c = centering(n, m.nu);
        j["sigma_n"] = c.sigma_n;
        j["a_n"] = c.a_n;
        j["q"] = ctx.extinction().q;
    }
    return j;
}

void run_survival_curves(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const MomentSummary m = ctx.law.moments();
    std::vector<SurvivalCurve> curves;
    ordered_json per_n = ordered_json::array();

    for (std::int64_t n : cfg.n_values) {
        const auto hops = sample_hopcounts_parallel(ctx.law, n, cfg.replications, cfg.seed,
                                                    cfg.oracle_bfs, cfg.threads);
        const SurvivalCurve curve = empirical_survival(hops, cfg.conditioning);
        curves.push_back(curve);
        const std::string file = "survival_n" + std::to_string(n) + ".csv";
        {
            auto out = ctx.open(file);
            write_survival_csv(out, curve);
        }
        ordered_json j = per_n_summary(ctx, n);
        j["dropped_fraction"] = curve.dropped_fraction;
        j["file"] = file;
        if (cfg.mode == RunMode::hopcount && m.supercritical) {
            const CenteringInfo c = centering(n, m.nu);
            const std::vector<std::int64_t> ks{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
            j["tightness"] = tightness_report(hops, c, ks);
        }
        per_n.push_back(std::move(j));
    }
    ctx.manifest["per_n"] = std::move(per_n);

    if (m.supercritical) {
        ordered_json shifts = ordered_json::array();
        for (std::size_t i = 0; i < curves.size(); ++i) {
            for (std::size_t j = i + 1; j < curves.size(); ++j) {
                const CenteringInfo ci = centering(cfg.n_values[i], m.nu);
                const CenteringInfo cj = centering(cfg.n_values[j], m.nu);
                const std::int64_t shift = cj.sigma_n - ci.sigma_n;
                ordered_json rec;
                rec["n1"] = cfg.n_values[i];
                rec["n2"] = cfg.n_values[j];
                rec["shift"] = shift;
                rec["distance"] = shift_distance(curves[i], curves[j], shift);
                shifts.push_back(std::move(rec));
            }
        }
        ctx.manifest["shift_distances"] = std::move(shifts);
    }
}

void run_components_mode(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const MomentSummary m = ctx.law.moments();
    ordered_json per_n = ordered_json::array();

    for (std::int64_t n : cfg.n_values) {
        const auto recs = component_replications_parallel(ctx.law, n, cfg.replications, cfg.seed,
                                                          cfg.trunc_eps, cfg.threads);
        const std::string summary_file = "components_summary_n" + std::to_string(n) + ".csv";
        {
            auto out = ctx.open(summary_file);
            out << "rep,largest,second,largest_fraction,nu_n,removed_edges,degree_cap\n";
            for (std::size_t r = 0; r < recs.size(); ++r) {
                const auto& rec = recs[r];
                out << r << ',' << rec.full.sizes.front() << ',' << rec.full.second_largest << ','
                    << format_double(rec.full.largest_fraction) << ','
                    << format_double(rec.nu_n) << ',' << rec.removed_edges << ','
                    << rec.degree_cap << '\n';
            }
        }
        {
            auto out = ctx.open("components_n" + std::to_string(n) + "_rep0.csv");
            write_components_csv(out, recs.front().full);
        }
        {
            auto out = ctx.open("truncated_components_n" + std::to_string(n) + "_rep0.csv");
            write_components_csv(out, recs.front().truncated);
        }

        double mean_largest = 0.0, mean_second = 0.0, mean_nu_n = 0.0, mean_removed = 0.0;
        for (const auto& rec : recs) {
            mean_largest += rec.full.largest_fraction;
            mean_second += static_cast<double>(rec.full.second_largest);
            mean_nu_n += rec.nu_n;
            mean_removed += static_cast<double>(rec.removed_edges);
        }
        const double reps = static_cast<double>(recs.size());
        ordered_json j = per_n_summary(ctx, n);
        j["mean_largest_fraction"] = mean_largest / reps;
        j["mean_second_largest"] = mean_second / reps;
        j["mean_second_over_log_n"] = mean_second / reps / std::log(static_cast<double>(n));
        j["mean_nu_n"] = mean_nu_n / reps;
        j["mean_removed_edges"] = mean_removed / reps;
        j["subcritical_flag"] = mean_nu_n / reps <= 1.0;
        if (!m.supercritical) j["subcritical_flag"] = true;
        j["files"] = {summary_file, "components_n" + std::to_string(n) + "_rep0.csv",
                      "truncated_components_n" + std::to_string(n) + "_rep0.csv"};
        per_n.push_back(std::move(j));
    }
    ctx.manifest["per_n"] = std::move(per_n);
}

void run_diagnostics_mode(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    ordered_json per_n = ordered_json::array();
    constexpr int m_max = 4; // coupling grown through generation 4, rates reported for m <= 3

    for (std::int64_t n : cfg.n_values) {
        const auto recs = diagnostics_replications_parallel(
            ctx.law, n, cfg.replications, cfg.seed, m_max, cfg.eps_prime, cfg.trunc_eps,
            cfg.threads);
        const std::string file = "diagnostics_n" + std::to_string(n) + ".csv";
        {
            auto out = ctx.open(file);
            out << "rep,l_ratio_dev,p_n,nu_dev,miscoupling_gen,cond1_sup,i_star,max_degree,"
                   "degree_cap\n";
            for (std::size_t r = 0; r < recs.size(); ++r) {
                const auto& rec = recs[r];
                out << r << ',' << format_double(rec.l_ratio_dev) << ','
                    << format_double(rec.p_n) << ',' << format_double(rec.nu_dev) << ',';
                if (rec.miscoupling_generation) out << *rec.miscoupling_generation;
                else out << -1;
                out << ',' << format_double(rec.well_behaved.cond1_sup) << ','
                    << (rec.well_behaved.i_star ? *rec.well_behaved.i_star : -1) << ','
                    << rec.well_behaved.max_degree << ',' << rec.well_behaved.degree_cap << '\n';
            }
        }

        double mean_l_dev = 0.0, mean_p_n = 0.0, mean_nu_dev = 0.0;
        std::int64_t p_n_small = 0, cond1_ok = 0, cond2_ok = 0;
        std::vector<std::int64_t> miscoupled(static_cast<std::size_t>(m_max) + 1, 0);
        for (const auto& rec : recs) {
            mean_l_dev += std::abs(rec.l_ratio_dev);
            mean_p_n += rec.p_n;
            mean_nu_dev += rec.nu_dev;
            if (rec.p_n < 0.05) ++p_n_small;
            if (rec.well_behaved.cond1_pass) ++cond1_ok;
            if (rec.well_behaved.cond2_pass) ++cond2_ok;
            if (rec.miscoupling_generation)
                for (int mm = *rec.miscoupling_generation; mm <= m_max; ++mm)
                    ++miscoupled[static_cast<std::size_t>(mm)];
        }
        const double reps = static_cast<double>(recs.size());
        ordered_json j = per_n_summary(ctx, n);
        j["mean_abs_l_ratio_dev"] = mean_l_dev / reps;
        j["mean_p_n"] = mean_p_n / reps;
        j["mean_nu_dev"] = mean_nu_dev / reps;
        j["fraction_p_n_below_0.05"] = static_cast<double>(p_n_small) / reps;
        j["cond1_pass_rate"] = static_cast<double>(cond1_ok) / reps;
        j["cond2_pass_rate"] = static_cast<double>(cond2_ok) / reps;
        ordered_json rates;
        for (int mm = 1; mm <= 3; ++mm)
            rates["m" + std::to_string(mm)] =
                static_cast<double>(miscoupled[static_cast<std::size_t>(mm)]) / reps;
        j["coupling_error_rate"] = std::move(rates);
        j["file"] = file;
        per_n.push_back(std::move(j));
    }
    ctx.manifest["per_n"] = std::move(per_n);
}

void run_bp_w_mode(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const MomentSummary m = ctx.law.moments();
    if (!m.supercritical) throw ConfigError("bp-w: law is not supercritical");
    const OffspringLaw g = ctx.law.size_biased_offspring();
    const int depth = cfg.w_depth > 0 ? cfg.w_depth : default_w_depth(m.nu);

    const auto w = sample_w_values_parallel(ctx.law, g, depth, cfg.w_samples, cfg.seed, 101,
                                            cfg.threads);
    {
        auto out = ctx.open("w_samples.csv");
        out << "value,weight\n";
        const std::string weight = format_double(1.0 / static_cast<double>(w.size()));
        for (double v : w) out << format_double(v) << ',' << weight << '\n';
    }

    double mean = 0.0;
    std::int64_t zeros = 0;
    for (double v : w) {
        mean += v;
        if (v == 0.0) ++zeros;
    }
    mean /= static_cast<double>(w.size());
    const ExtinctionResult ext = extinction_probability(ctx.law, g);
    ctx.manifest["w"] = {{"depth", depth},
                         {"samples", cfg.w_samples},
                         {"mean", mean},
                         {"atom_zero_frequency",
                          static_cast<double>(zeros) / static_cast<double>(w.size())},
                         {"q", ext.q},
                         {"s_star", ext.s_star}};

    const DiscretizedW law_w = w_law_fixed_point(ctx.law, g);
    {
        auto out = ctx.open("w_law.csv");
        out << "value,probability\n";
        for (std::size_t i = 0; i < law_w.x.size(); ++i) {
            if (law_w.prob[i] == 0.0) continue;
            out << format_double(law_w.x[i]) << ',' << format_double(law_w.prob[i]) << '\n';
        }
    }
    ctx.manifest["w_law"] = {{"raw_mass", law_w.raw_mass}, {"mean", law_w.mean}};
}

void run_limit_law_mode(RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const MomentSummary m = ctx.law.moments();
    if (!m.supercritical) throw ConfigError("limit-law: law is not supercritical");
    const OffspringLaw g = ctx.law.size_biased_offspring();
    const int depth = cfg.w_depth > 0 ? cfg.w_depth : default_w_depth(m.nu);
    const auto pairs = sample_w_pairs(ctx.law, g, depth, cfg.w_samples, cfg.seed, cfg.threads);

    ordered_json per_n = ordered_json::array();
    for (std::int64_t n : cfg.n_values) {
        const CenteringInfo c = centering(n, m.nu);
        const SurvivalCurve curve = theoretical_survival_curve(c, pairs, m, -8, 12);
        const std::string file = "limit_law_n" + std::to_string(n) + ".csv";
        {
            auto out = ctx.open(file);
            write_survival_csv(out, curve);
        }
        const ExpectedRResult er = expected_r(c.a_n, pairs, m, 40);
        ordered_json j = per_n_summary(ctx, n);
        j["kappa"] = m.kappa;
        j["expected_r"] = er.value;
        j["expected_r_truncation_bound"] = er.truncation_bound;
        j["file"] = file;
        per_n.push_back(std::move(j));
    }
    ctx.manifest["per_n"] = std::move(per_n);
}

} // namespace

std::string run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunContext ctx(cfg);
    switch (cfg.mode) {
    case RunMode::fig1:
    case RunMode::fig2:
    case RunMode::hopcount:
        run_survival_curves(ctx);
        break;
    case RunMode::components:
        run_components_mode(ctx);
        break;
    case RunMode::coupling_diagnostics:
        run_diagnostics_mode(ctx);
        break;
    case RunMode::bp_w:
        run_bp_w_mode(ctx);
        break;
    case RunMode::limit_law:
        run_limit_law_mode(ctx);
        break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    return ctx.finish(std::chrono::duration<double>(t1 - t0).count());
}

} // namespace cfgdist
