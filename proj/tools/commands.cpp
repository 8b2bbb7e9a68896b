#include "commands.hpp"

#include "generators.hpp"

#include "chaosres/bounds.hpp"
#include "chaosres/empirical.hpp"
#include "chaosres/errors.hpp"
#include "chaosres/gamma.hpp"
#include "chaosres/matrixisation.hpp"
#include "chaosres/norms.hpp"
#include "chaosres/parallel.hpp"
#include "chaosres/report.hpp"
#include "chaosres/rng.hpp"
#include "chaosres/tensor_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace chaosres::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputOptions {
    std::optional<std::size_t> identity;
    std::vector<std::string> block;
    std::vector<std::string> random;
    std::string file;
};

struct BlockParams {
    std::size_t n = 0, w = 0, d = 0;
    double scale = 1.0;
};

struct Input {
    CoeffTensor tensor;
    std::optional<BlockParams> block;
};

struct CommonOptions {
    std::string out;
    std::string format;
    std::optional<int> threads;
};

void add_input(CLI::App* app, InputOptions& in) {
    app->add_option("--identity", in.identity, "identity matrix of size N")->check(CLI::PositiveNumber);
    app->add_option("--block", in.block, "block tensor: n=.. w=.. d=.. [scale=..]")->expected(3, 4);
    app->add_option("--random", in.random, "random tensor: d=.. n=.. [density=..] seed=..")->expected(3, 4);
    app->add_option("--file", in.file, "tensor JSON file");
}

void add_common(CLI::App* app, CommonOptions& c, const std::string& default_format) {
    c.format = default_format;
    app->add_option("--out", c.out, "write output to this path instead of stdout");
    app->add_option("--threads", c.threads, "cap on parallel workers")->check(CLI::PositiveNumber);
    if (!default_format.empty())
        app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

Input load_input(const InputOptions& in) {
    const int sources = (in.identity ? 1 : 0) + (!in.block.empty() ? 1 : 0) + (!in.random.empty() ? 1 : 0) +
                        (!in.file.empty() ? 1 : 0);
    if (sources != 1) throw UsageError("exactly one of --identity, --block, --random, --file is required");
    if (in.identity) return {identity_matrix(*in.identity), std::nullopt};
    if (!in.block.empty()) {
        const auto spec = parse_generator(in.block, {"n", "w", "d", "scale"});
        BlockParams b;
        b.n = spec.size("n");
        b.w = spec.size("w");
        b.d = spec.size("d");
        if (spec.has("scale")) b.scale = spec.real("scale");
        if (b.n == 0 || b.w == 0 || b.d == 0) throw UsageError("block generator needs positive n, w, d");
        if (b.n % b.w != 0) throw UsageError("block width w must divide n");
        if (b.scale == 0.0) throw UsageError("block scale must be nonzero");
        return {block_tensor(b.n, b.w, b.d, b.scale), b};
    }
    if (!in.random.empty()) {
        const auto spec = parse_generator(in.random, {"d", "n", "density", "seed"});
        const double density = spec.has("density") ? spec.real("density") : 0.5;
        if (!(density > 0.0 && density <= 1.0)) throw UsageError("density must lie in (0, 1]");
        const auto d = spec.size("d"), n = spec.size("n");
        if (d == 0 || n == 0) throw UsageError("random generator needs positive d and n");
        return {random_tensor(d, n, density, spec.has("seed") ? spec.seed("seed") : 0), std::nullopt};
    }
    return {read_tensor_file(in.file), std::nullopt};
}

void apply_threads(const CommonOptions& c) {
    if (c.threads) {
        set_worker_count(*c.threads);
        return;
    }
    if (const char* env = std::getenv("CHAOS_RESILIENCE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) set_worker_count(static_cast<int>(v));
    }
}

void emit(const CommonOptions& c, const std::string& text, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out, std::ios::binary);
    if (!file) throw Error("cannot write output file " + c.out);
    file << text;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text, std::size_t n) {
    auto parse_one = [&](const std::string& s) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (s.empty() || pos != s.size() || s.front() == '-') throw UsageError("invalid r value '" + s + "'");
        return static_cast<std::size_t>(v);
    };
    const auto dots = text.find("..");
    const std::size_t lo = parse_one(dots == std::string::npos ? text : text.substr(0, dots));
    const std::size_t hi = dots == std::string::npos ? lo : parse_one(text.substr(dots + 2));
    if (lo > hi) throw UsageError("r range '" + text + "' is empty");
    if (hi > n) throw UsageError("r range '" + text + "' exceeds n = " + std::to_string(n));
    return {lo, hi};
}

std::size_t max_dim(const CoeffTensor& f) { return *std::max_element(f.dims().begin(), f.dims().end()); }

// ---------------------------------------------------------------------------

struct ProfileOptions {
    InputOptions input;
    CommonOptions common;
    bool gamma = false;
};

int cmd_profile(const ProfileOptions& o, std::ostream& out) {
    apply_threads(o.common);
    const auto in = load_input(o.input);
    const auto& f = in.tensor;
    Json j;
    j["degree"] = f.degree();
    j["dims"] = f.dims();
    j["nnz"] = f.nnz();
    const auto tp = tensor_profile(f);
    j["frobenius"] = tp.frobenius;
    j["frobenius_sq"] = tp.frobenius * tp.frobenius;
    j["max_abs"] = tp.max_abs;
    if (f.degree() == 2) {
        const auto mp = matrix_profile(f);
        j["stable_rank"] = mp.stable_rank ? Json(*mp.stable_rank) : Json(nullptr);
        j["matrix"] = json_of(mp);
        if (!f.is_zero()) {
            const auto reg = bilinear_regime(mp);
            j["regime"] = {{"label", to_string(reg.regime)},
                           {"expression", to_string(reg.expression)},
                           {"value", reg.value},
                           {"derivation_value", reg.derivation_value},
                           {"warnings", reg.warnings}};
        }
    }
    if (o.gamma) j["gamma"] = json_of(gamma_profile(f));
    emit(o.common, j.dump(2) + "\n", out);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct CertifyOptions {
    InputOptions input;
    CommonOptions common;
    std::string r = "1..";
    bool quadratic = false;
    bool closed_form = false;
    std::string mode = "auto";
    ConstantSet consts;
};

int cmd_certify(const CertifyOptions& o, std::ostream& out) {
    apply_threads(o.common);
    if (o.closed_form && o.input.block.empty()) throw UsageError("--closed-form requires --block");
    const auto in = load_input(o.input);
    const auto& f = in.tensor;
    const std::size_t n = max_dim(f);
    const std::string r_text = o.r == "1.." ? "1.." + std::to_string(std::min<std::size_t>(n, 8)) : o.r;
    const auto [lo, hi] = parse_range(r_text, n);

    std::string mode = o.quadratic ? "quadratic" : o.mode;
    if (mode == "auto") mode = f.degree() == 2 ? "bilinear" : "multilinear";
    if (o.closed_form) mode = "block";
    if ((mode == "bilinear" || mode == "quadratic") && f.degree() != 2)
        throw UsageError(mode + " certificates need a degree-2 input");

    std::vector<BoundReport> rows;
    if (mode == "block") {
        const auto& b = *in.block;
        for (std::size_t r = lo; r <= hi; ++r)
            rows.push_back(block_tensor_bound(b.n, b.w, b.d, static_cast<double>(r), b.scale, o.consts));
    } else if (mode == "bilinear") {
        if (f.is_zero()) throw DomainError("bilinear certificate is undefined for the zero matrix");
        const auto p = matrix_profile(f);
        for (std::size_t r = lo; r <= hi; ++r) {
            rows.push_back(bilinear_bound(p, static_cast<double>(r), o.consts));
            rows.back().input = "matrix " + std::to_string(p.rows) + "x" + std::to_string(p.cols);
        }
    } else if (mode == "quadratic") {
        for (std::size_t r = lo; r <= hi; ++r) rows.push_back(quadratic_bound(f, static_cast<double>(r), o.consts));
    } else {
        const auto prepared = prepare_multilinear(f);
        for (std::size_t r = lo; r <= hi; ++r)
            rows.push_back(multilinear_bound(prepared, static_cast<double>(r), o.consts));
    }
    emit(o.common, o.common.format == "json" ? to_json(rows) + "\n" : to_csv(rows), out);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct EmpiricalOptions {
    InputOptions input;
    CommonOptions common;
    double x = 0.0;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::optional<std::size_t> r_max;
    std::string method = "auto";
};

int cmd_empirical(const EmpiricalOptions& o, std::ostream& out) {
    apply_threads(o.common);
    const auto in = load_input(o.input);
    const auto& f = in.tensor;
    std::size_t coords = 0;
    for (auto n : f.dims()) coords += n;
    const std::size_t r_max = o.r_max.value_or(coords);
    ResilienceOptions ro;
    ro.method = o.method == "exhaustive" ? SearchMethod::exhaustive_bfs
                : o.method == "mitm"     ? SearchMethod::meet_in_middle
                                         : SearchMethod::automatic;
    const auto cdf = resilience_distribution(f, o.x, r_max, o.trials, o.seed, ro);
    emit(o.common, o.common.format == "json" ? to_json(cdf) + "\n" : to_csv(cdf), out);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
    InputOptions input;
    CommonOptions common;
    std::string suite;
    std::optional<std::size_t> trials;
    std::uint64_t seed = 0;
    std::size_t oracle_limit = 16;
};

class Checklist {
public:
    void check(bool pass, const std::string& line) {
        out_ << (pass ? "[PASS] " : "[FAIL] ") << line << '\n';
        ++total_;
        failed_ += pass ? 0 : 1;
    }
    void info(const std::string& line) { out_ << "[INFO] " << line << '\n'; }
    [[nodiscard]] std::string finish(const std::string& suite) {
        out_ << suite << ": " << total_ << " checks, " << failed_ << " failed\n";
        return out_.str();
    }
    [[nodiscard]] bool ok() const { return failed_ == 0; }

private:
    std::ostringstream out_;
    std::size_t total_ = 0;
    std::size_t failed_ = 0;
};

void suite_gamma(const CoeffTensor& f, const VerifyOptions& o, Checklist& list) {
    if (f.degree() < 2) throw UsageError("the gamma suite needs degree >= 2");
    for (std::size_t slot = 0; slot < f.degree(); ++slot) {
        for (std::size_t k = 2; k <= 2 * (f.degree() - 1); k += 2) {
            const double norm = gamma_norm(f, slot, k);
            const double oracle = gamma_oracle(f, slot, k, Exec::parallel, o.oracle_limit);
            const double scale = std::max(std::abs(norm), std::abs(oracle));
            const double rel = scale == 0.0 ? 0.0 : std::abs(norm - oracle) / scale;
            list.check(rel <= 1e-9, "gamma slot=" + std::to_string(slot + 1) + " k=" + std::to_string(k) +
                                        " norm=" + format_double(norm) + " oracle=" + format_double(oracle) +
                                        " rel_err=" + format_double(rel));
        }
    }
}

void suite_concentration(const CoeffTensor& f, const VerifyOptions& o, Checklist& list) {
    const std::size_t trials = o.trials.value_or(1000);
    for (std::size_t slot = 0; slot < f.degree(); ++slot) {
        const auto rep = verify_concentration(f, slot, trials, mix_seed(o.seed, slot));
        const std::string tag = "slot=" + std::to_string(slot + 1);
        list.info("small-norm " + tag + " frequency=" + format_double(rep.small_norm_frequency) +
                  " stderr=" + format_double(rep.small_norm_stderr));
        if (rep.has_sup_check)
            list.check(rep.sup_pass, "sup-ceiling " + tag + " mean=" + format_double(rep.sup_mean) +
                                         " stderr=" + format_double(rep.sup_stderr) +
                                         " ceiling=" + format_double(rep.sup_ceiling) +
                                         " margin=" + format_double(rep.sup_ceiling - rep.sup_mean));
        list.info("levy " + tag + " eps=" + format_double(rep.mean_flip_radius) +
                  " value=" + format_double(rep.levy_value) + " ratio=" + format_double(rep.levy_ratio));
    }
}

void suite_radius(const CoeffTensor& f, const VerifyOptions& o, Checklist& list) {
    const std::size_t trials = o.trials.value_or(20);
    const std::size_t d = f.degree();
    std::size_t violations = 0, checks = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        const auto e = sample_ensemble(f.dims(), mix_seed(o.seed, t));
        for (std::size_t r = 1; r <= 2; ++r) {
            const double eps = flip_radius_multilinear(f, e, static_cast<double>(r));
            // every split of r flips over the d slots
            std::vector<std::size_t> budget(d, 0);
            std::function<void(std::size_t, std::size_t)> split = [&](std::size_t p, std::size_t left) {
                if (p + 1 == d) {
                    budget[p] = left;
                    const double delta = delta_exhaustive(f, e, budget);
                    ++checks;
                    worst = std::max(worst, delta - eps);
                    if (delta > eps * (1.0 + 1e-12)) ++violations;
                    return;
                }
                for (std::size_t k = 0; k <= left; ++k) {
                    budget[p] = k;
                    split(p + 1, left - k);
                }
            };
            split(0, r);
        }
    }
    list.check(violations == 0, "radius checks=" + std::to_string(checks) + " violations=" +
                                    std::to_string(violations) + " worst(delta-eps)=" + format_double(worst));
}

void suite_decoupling(const CoeffTensor& f, const VerifyOptions& o, Checklist& list) {
    if (f.degree() != 2 || f.dim(0) != f.dim(1)) throw UsageError("the decoupling suite needs a square matrix");
    const auto q = quadratic_normalize(f, 0.0);
    if (q.matrix.is_zero()) throw DegenerateChaosError("normalized matrix is zero; nothing to decouple");
    const std::size_t trials = o.trials.value_or(100);
    std::size_t worst_tries = 0, failures = 0;
    double min_ratio = 1.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto part = find_decoupling_partition(q.matrix, mix_seed(o.seed, t));
        worst_tries = std::max(worst_tries, part.tries);
        min_ratio = std::min(min_ratio, part.ratio);
        if (!(8.0 * part.ratio >= 1.0)) ++failures;
    }
    list.check(failures == 0, "decoupling partitions=" + std::to_string(trials) +
                                  " min_ratio=" + format_double(min_ratio) +
                                  " max_tries=" + std::to_string(worst_tries));
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
    apply_threads(o.common);
    const auto in = load_input(o.input);
    Checklist list;
    if (o.suite == "gamma")
        suite_gamma(in.tensor, o, list);
    else if (o.suite == "concentration")
        suite_concentration(in.tensor, o, list);
    else if (o.suite == "radius")
        suite_radius(in.tensor, o, list);
    else
        suite_decoupling(in.tensor, o, list);
    emit(o.common, list.finish(o.suite), out);
    return list.ok() ? exit_ok : exit_verify_failed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Resilience certificates for Rademacher chaos", "chaosres"};
    app.require_subcommand(1);

    ProfileOptions profile;
    auto* p = app.add_subcommand("profile", "norm and support statistics as JSON");
    add_input(p, profile.input);
    add_common(p, profile.common, "");
    p->add_flag("--gamma", profile.gamma, "include the Gamma-norm table");

    CertifyOptions certify;
    auto* c = app.add_subcommand("certify", "certificate rows over a range of r");
    add_input(c, certify.input);
    add_common(c, certify.common, "csv");
    c->add_option("--r", certify.r, "r or a..b (default 1..min(n,8))");
    c->add_flag("--quadratic", certify.quadratic, "certify the quadratic form x^T M x");
    c->add_flag("--closed-form", certify.closed_form, "closed-form block certificate (requires --block)");
    c->add_option("--mode", certify.mode, "certificate family")
        ->check(CLI::IsMember({"auto", "bilinear", "multilinear", "quadratic"}));
    c->add_option("--c1", certify.consts.c1)->check(CLI::PositiveNumber);
    c->add_option("--c2", certify.consts.c2)->check(CLI::PositiveNumber);
    c->add_option("--c3", certify.consts.c3)->check(CLI::PositiveNumber);
    c->add_option("--c4", certify.consts.c4)->check(CLI::PositiveNumber);
    c->add_option("--c-sum", certify.consts.c_sum)->check(CLI::PositiveNumber);
    c->add_option("--c-exp", certify.consts.c_exp)->check(CLI::PositiveNumber);
    c->add_option("--theta", certify.consts.theta)->check(CLI::PositiveNumber);

    EmpiricalOptions empirical;
    auto* e = app.add_subcommand("empirical", "Monte-Carlo CDF of exact resilience");
    add_input(e, empirical.input);
    add_common(e, empirical.common, "csv");
    e->add_option("--x", empirical.x, "target level");
    e->add_option("--trials", empirical.trials, "number of ensembles")->check(CLI::PositiveNumber);
    e->add_option("--seed", empirical.seed);
    e->add_option("--r-max", empirical.r_max, "largest r reported (default: all coordinates)");
    e->add_option("--method", empirical.method)->check(CLI::IsMember({"auto", "exhaustive", "mitm"}));

    VerifyOptions verify;
    auto* v = app.add_subcommand("verify", "run a verification suite; PASS/FAIL per check");
    add_input(v, verify.input);
    add_common(v, verify.common, "");
    v->add_option("--suite", verify.suite)
        ->required()
        ->check(CLI::IsMember({"gamma", "concentration", "radius", "decoupling"}));
    v->add_option("--trials", verify.trials)->check(CLI::PositiveNumber);
    v->add_option("--seed", verify.seed);
    v->add_option("--oracle-limit", verify.oracle_limit, "coordinate limit of the exhaustive Gamma oracle");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& ex) {
        err << "usage error: " << ex.what() << '\n';
        return exit_usage;
    }

    try {
        if (p->parsed()) return cmd_profile(profile, out);
        if (c->parsed()) return cmd_certify(certify, out);
        if (e->parsed()) return cmd_empirical(empirical, out);
        return cmd_verify(verify, out);
    } catch (const UsageError& ex) {
        err << "usage error: " << ex.what() << '\n';
        return exit_usage;
    } catch (const ParseError& ex) {
        err << "parse error: " << ex.what() << '\n';
        return exit_parse;
    } catch (const GuardError& ex) {
        err << "guard refusal: " << ex.what() << '\n';
        return exit_guard;
    } catch (const DegenerateChaosError& ex) {
        err << "degenerate chaos: " << ex.what() << '\n';
        return exit_error;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return exit_error;
    }
}

}  // namespace chaosres::cli
