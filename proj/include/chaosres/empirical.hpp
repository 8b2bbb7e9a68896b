#pragma once

#include "chaosres/parallel.hpp"
#include "chaosres/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chaosres {

enum class SearchMethod { automatic, exhaustive_bfs, meet_in_middle };

struct ResilienceOptions {
    SearchMethod method = SearchMethod::automatic;
    /// Search stops beyond this radius and reports beyond_cap.
    std::size_t max_radius = static_cast<std::size_t>(-1);
    /// Level-set tolerance; default is 0 for integer tensors, 1e-9 |f|_F otherwise.
    std::optional<double> tolerance;
    /// Exhaustive search refuses ensembles with more coordinates than this.
    std::size_t max_coordinates = 26;
    /// Meet-in-the-middle refuses an inner slot longer than this.
    std::size_t max_inner_length = 40;
    /// Meet-in-the-middle refuses to enumerate more outer flip sets than this.
    std::uint64_t max_outer_sets = 10'000'000;
};

struct ResilienceResult {
    enum class Outcome { found, unreachable, beyond_cap };
    Outcome outcome = Outcome::unreachable;
    std::size_t value = 0;  // meaningful when found
    std::optional<SignEnsemble> witness;
    SearchMethod method = SearchMethod::exhaustive_bfs;

    [[nodiscard]] bool found() const { return outcome == Outcome::found; }
    [[nodiscard]] bool infinite() const { return outcome == Outcome::unreachable; }
};

[[nodiscard]] std::string to_string(SearchMethod m);

/// Minimum number of sign flips taking f(E) to x.
[[nodiscard]] ResilienceResult exact_resilience(const CoeffTensor& f, const SignEnsemble& e, double x,
                                                const ResilienceOptions& opts = {});

struct EmpiricalCdf {
    std::vector<std::size_t> r;
    std::vector<double> estimate;
    std::vector<double> standard_error;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Per-trial resilience on ensembles drawn with seeds mix_seed(seed, t).
[[nodiscard]] std::vector<ResilienceResult> resilience_samples(const CoeffTensor& f, double x, std::size_t trials,
                                                               std::uint64_t seed, const ResilienceOptions& opts = {},
                                                               Exec exec = Exec::parallel);

/// Estimates P(res_x <= r) for r = 0..r_max with binomial standard errors.
[[nodiscard]] EmpiricalCdf resilience_distribution(const CoeffTensor& f, double x, std::size_t r_max,
                                                   std::size_t trials, std::uint64_t seed,
                                                   ResilienceOptions opts = {}, Exec exec = Exec::parallel);

/// Largest empirical mass in a closed window of width 2 eps.
[[nodiscard]] double levy_concentration(std::span<const double> samples, double eps);

enum class AtomMode { exact, monte_carlo };

struct AtomEstimate {
    double probability = 0.0;
    double standard_error = 0.0;  // 0 in exact mode
    std::uint64_t samples = 0;
    AtomMode mode = AtomMode::exact;
};

/// Largest point mass of f(E). Exact mode enumerates the cube (at most
/// max_exact_bits coordinates); Monte-Carlo mode draws `budget` ensembles.
[[nodiscard]] AtomEstimate atom_probability(const CoeffTensor& f, AtomMode mode, std::uint64_t budget = 100'000,
                                            std::uint64_t seed = 0, Exec exec = Exec::parallel,
                                            std::size_t max_exact_bits = 24);

/// Exact max |f(Psi) - f(E)| over ensembles with at most budget[p] flips in slot p.
[[nodiscard]] double delta_exhaustive(const CoeffTensor& f, const SignEnsemble& e, std::span<const std::size_t> budget,
                                      std::uint64_t max_evaluations = 10'000'000, Exec exec = Exec::parallel);

struct DecouplingPartition {
    std::vector<std::size_t> first;   // 0-based
    std::vector<std::size_t> second;  // 0-based
    std::size_t tries = 0;
    double ratio = 0.0;  // |M_(first, second)|_F^2 / |M|_F^2
};

/// Random Bernoulli(1/2) partitions until |M_(I1,I2)|_F^2 >= |M|_F^2 / 8.
[[nodiscard]] DecouplingPartition find_decoupling_partition(const CoeffTensor& m, std::uint64_t seed,
                                                            std::size_t max_tries = 1000);

struct ConcentrationReport {
    std::size_t slot = 0;
    std::size_t trials = 0;
    // (a) frequency of |v_{f,slot}|_2 <= |f|_F / 2
    double small_norm_frequency = 0.0;
    double small_norm_stderr = 0.0;
    // (b) degree 2 only: E |A xi|_inf against |A|_{inf,2} sqrt(2 ln 2n)
    bool has_sup_check = false;
    double sup_mean = 0.0;
    double sup_stderr = 0.0;
    double sup_ceiling = 0.0;
    bool sup_pass = true;
    // (c) Levy concentration of f at the mean flip radius (reported only)
    double r = 1.0;
    double mean_flip_radius = 0.0;
    double levy_value = 0.0;
    double levy_ratio = 0.0;  // levy_value / (mean_flip_radius / |f|_F)
};

[[nodiscard]] ConcentrationReport verify_concentration(const CoeffTensor& f, std::size_t slot, std::size_t trials,
                                                       std::uint64_t seed, double r = 1.0,
                                                       Exec exec = Exec::parallel);

}  // namespace chaosres
