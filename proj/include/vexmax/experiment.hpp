#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vexmax/io.hpp"

namespace vexmax {

// ---- generators ----

/// n points i/n on [0,1), mass 1/n.
SpaceSpec generate_line(std::size_t n);
/// m x m grid on the flat unit torus (n = m^2 points), mass 1/n.
SpaceSpec generate_torus_grid(std::size_t n);
/// Left endpoints of the 2^L middle-thirds intervals (n = 2^L), mass 1/n.
SpaceSpec generate_cantor_like(std::size_t n);
/// Random quasi-metric: |x-y|^{3/2} for random planar points, perturbed by
/// symmetric factors in [1/2, 2], then d(x,y) <- min(d(x,y), 2(d(x,z)+d(z,y)))
/// until stable, so that a0 <= 2. Masses are uniform in [1/2, 2] / n.
SpaceSpec generate_random_metric(std::size_t n, std::uint64_t seed);
/// Dispatch on kind in {line, torus-grid, cantor-like, random-metric}.
SpaceSpec generate_space(const std::string& kind, std::size_t n, std::uint64_t seed);

/// Exponent q from either an explicit spec or p and eta; q = p when neither
/// is given.
Exponent resolve_q(const Exponent& p, const std::optional<Json>& q_spec, std::optional<double> eta,
                   const QuasiMetricSpace& space);

// ---- sweeps ----

/// Elapsed seconds per named phase; kept out of the reports.
using Timings = std::map<std::string, double>;

struct ExperimentConfig {
    std::string generator = "line";
    std::vector<std::size_t> sizes{32, 64, 128};
    std::optional<Json> space;  // a fixed space replaces the generator sweep
    Json p = {{"type", "constant"}, {"value", 2.0}};
    std::optional<Json> q;
    std::optional<double> eta;
    Json weight = {{"type", "constant"}};
    std::size_t grids = kDefaultGridCount;
    std::uint64_t seed = 1;
    double tol = 1e-12;
    std::size_t random_functions = 8;
    std::size_t ball_indicators = 16;
    std::optional<std::string> expect;   // "bounded" or "growing"
    std::map<std::string, Json> inputs;  // source and hash of every input file
};

struct SweepRow {
    std::size_t n = 0;
    double apq = 0.0;
    Json apq_ball;
    double strong_ratio = 0.0;
    double weak_ratio = 0.0;
    std::string strong_witness;
    std::string weak_witness;
    std::size_t family_size = 0;
    double extremal_weak = 0.0;  // L: best weak ratio over the extremal family
    double c_nec = 0.0;          // apq / L
};

enum class Trend { Bounded, Growing, Inconclusive };
const char* trend_name(Trend t);

inline constexpr double kGrowthThreshold = 1.5;
inline constexpr std::size_t kMinDoublings = 3;

/// Bounded: growth per doubling of n below 1.5 at every step. Growing: at
/// least 1.5 per doubling at every step over at least 3 doublings.
Trend classify_trend(const std::vector<std::size_t>& sizes, const std::vector<double>& values);

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, Timings* timings = nullptr);

/// Reports for the three sweep commands. `pass` is false on a verdict failure.
struct CommandReport {
    Json report;
    std::string csv;
    bool pass = true;
};
CommandReport cmd_strong(const ExperimentConfig& cfg, Timings* timings = nullptr);
CommandReport cmd_weak(const ExperimentConfig& cfg, Timings* timings = nullptr);
CommandReport cmd_necessity(const ExperimentConfig& cfg, Timings* timings = nullptr);

// ---- invariant suite ----

struct CorpusCase {
    std::string name;
    Json space;  // a space file object or {"generator": kind, "n": n[, "seed": s]}
    Json p;
    std::optional<Json> q;
    std::optional<double> eta;
    Json weight = {{"type", "constant"}};
};

std::vector<CorpusCase> default_corpus();
/// The space of a corpus case, generated or read from its inline file.
SpaceSpec corpus_space(const CorpusCase& c);
/// Array of {"name","space","p",["q"|"eta"],"weight"}. Throws
/// ValidationError("no cases") for an empty array.
std::vector<CorpusCase> corpus_from_json(const Json& j);
Json corpus_to_json(const std::vector<CorpusCase>& cases);

struct VerifyOptions {
    std::size_t grids = kDefaultGridCount;
    std::uint64_t seed = 1;
    double tol = 1e-12;
    bool inject_bad_grid = false;  // overstate c_d on the first grid of the first case
};

CommandReport cmd_verify_all(const std::vector<CorpusCase>& cases, const VerifyOptions& opt,
                             Timings* timings = nullptr);

}  // namespace vexmax
