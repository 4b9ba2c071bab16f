#include "isingcorr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "isingcorr/correlations.hpp"

namespace isingcorr {
namespace {

// One output record; the column set is fixed across all subcommands.
// S and Sbar are absent for observables that depend on k alone.
struct Record {
    int N = 0;
    double k = 0.0;
    std::optional<double> S, Sbar;
    double value = 0.0;
    std::string method;
    double imag_residue = 0.0;
    double est_error = 0.0;
};

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Emitter {
public:
    Emitter(std::ostream& os, std::string format)
        : os_(os), format_(std::move(format)) {}

    void add(const Record& r) {
        if (first_) {
            if (format_ == "csv")
                os_ << "N,k,S,Sbar,value,method,imag_residue,est_error\n";
            else
                os_ << "[\n";
            first_ = false;
        }
        if (format_ == "csv") {
            os_ << r.N << ',' << num17(r.k) << ','
                << (r.S ? num17(*r.S) : "") << ','
                << (r.Sbar ? num17(*r.Sbar) : "") << ','
                << num17(r.value) << ',' << r.method << ','
                << num17(r.imag_residue) << ',' << num17(r.est_error) << '\n';
        } else {
            nlohmann::ordered_json j;
            j["N"] = r.N;
            j["k"] = r.k;
            if (r.S) j["S"] = *r.S; else j["S"] = nullptr;
            if (r.Sbar) j["Sbar"] = *r.Sbar; else j["Sbar"] = nullptr;
            j["value"] = r.value;
            j["method"] = r.method;
            j["imag_residue"] = r.imag_residue;
            j["est_error"] = r.est_error;
            if (!first_record_) os_ << ",\n";
            os_ << "  " << j.dump();
            first_record_ = false;
        }
    }

    void finish() {
        if (format_ != "csv") {
            if (first_) os_ << "[";
            os_ << "\n]\n";
        } else if (first_) {
            os_ << "N,k,S,Sbar,value,method,imag_residue,est_error\n";
        }
        os_.flush();
    }

private:
    std::ostream& os_;
    std::string format_;
    bool first_ = true;
    bool first_record_ = true;
};

struct RunConfig {
    double k = 0.0;
    bool k_given = false;
    bool critical = false;
    std::optional<double> S;
    int N = 1;
    int N_max = 8;
    int n_min = -8, n_max = 8;
    bool dual = false;
    std::string family = "diag";
    double k_min = 0.5, k_max = 2.0;
    int steps = 8;
    std::string method;
    double tol = 1e-7;
    int nodes_cap = max_contour_nodes;
    std::string format = "csv";
    std::string output;
    bool perturb = false;
};

Method parse_method(const std::string& s) {
    if (s == "recurrence") return Method::recurrence;
    if (s == "determinant") return Method::determinant;
    if (s == "elliptic") return Method::elliptic;
    if (s == "epsilon-recurrence") return Method::epsilon_recurrence;
    if (s == "critical-closed-form") return Method::critical_closed_form;
    throw domain_error("unknown method name: " + s);
}

void check_node_budget(const CorrelationResult& r, int cap) {
    if (r.diagnostics.M_used && *r.diagnostics.M_used > cap)
        throw convergence_error("node budget exceeded: used " +
                                std::to_string(*r.diagnostics.M_used) + " of " +
                                std::to_string(cap));
}

// Exactly isotropic parameters route through the two-sided limit; anything
// else inside the pinch band cannot be evaluated pointwise and is reported
// as a runtime failure rather than silently displaced onto the line.
bool on_isotropic_line(double S, double k) {
    return std::abs(S * S - k) <= 1e-9 * k;
}

int run_diag(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    const double k = cfg.critical ? 1.0 : cfg.k;
    const std::string method = cfg.method.empty() ? "recurrence" : cfg.method;
    for (int N = 1; N <= cfg.N; ++N) {
        Record rec;
        rec.N = N;
        rec.k = k;
        if (method == "both") {
            const auto a = diag_corr(N, k, Method::recurrence);
            const auto b = diag_corr(N, k, Method::determinant);
            const double dev = std::abs(a.value - b.value) /
                               std::max({std::abs(a.value), std::abs(b.value), 1e-12});
            if (dev > cfg.tol) {
                err << "diag: methods disagree at N = " << N << " (relative "
                    << num17(dev) << " > " << num17(cfg.tol) << ")\n";
                return 2;
            }
            rec.value = a.value;
            rec.method = "both";
            rec.est_error = std::max({a.diagnostics.est_error, b.diagnostics.est_error,
                                      std::abs(a.value - b.value)});
        } else {
            const auto r = diag_corr(N, k, parse_method(method));
            rec.value = r.value;
            rec.method = method;
            rec.est_error = r.diagnostics.est_error;
        }
        em.add(rec);
    }
    return 0;
}

int run_nextdiag(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    const double k = cfg.critical ? 1.0 : cfg.k;
    const double S = *cfg.S;
    const double Sbar = k / S;
    const std::string method = cfg.method.empty() ? "epsilon-recurrence" : cfg.method;
    const bool isotropic = on_isotropic_line(S, k);
    for (int N = 1; N <= cfg.N; ++N) {
        Record rec;
        rec.N = N;
        rec.k = k;
        rec.S = S;
        rec.Sbar = Sbar;
        if (isotropic) {
            const auto r = nextdiag_isotropic_limit(N, ising_params(S, S));
            rec.value = r.value;
            rec.method = "isotropic-limit";
            rec.imag_residue = r.diagnostics.imag_residue;
            rec.est_error = r.diagnostics.est_error;
        } else if (method == "both") {
            const auto p = ising_params(S, Sbar);
            const auto a = nextdiag_corr(N, p, Method::epsilon_recurrence);
            const auto b = nextdiag_corr(N, p, Method::determinant);
            check_node_budget(a, cfg.nodes_cap);
            check_node_budget(b, cfg.nodes_cap);
            const double dev = std::abs(a.value - b.value) /
                               std::max({std::abs(a.value), std::abs(b.value), 1e-12});
            if (dev > cfg.tol) {
                err << "nextdiag: methods disagree at N = " << N << " (relative "
                    << num17(dev) << " > " << num17(cfg.tol) << ")\n";
                return 2;
            }
            rec.value = a.value;
            rec.method = "both";
            rec.imag_residue = a.diagnostics.imag_residue;
            rec.est_error = std::max({a.diagnostics.est_error, b.diagnostics.est_error,
                                      std::abs(a.value - b.value)});
        } else {
            const auto r = nextdiag_corr(N, ising_params(S, Sbar), parse_method(method));
            check_node_budget(r, cfg.nodes_cap);
            rec.value = r.value;
            rec.method = method;
            rec.imag_residue = r.diagnostics.imag_residue;
            rec.est_error = r.diagnostics.est_error;
        }
        em.add(rec);
    }
    return 0;
}

int run_moments(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    const double k = cfg.critical ? 1.0 : cfg.k;
    const double k_eff = cfg.dual ? 1.0 / k : k;
    const std::string method = cfg.method.empty() ? "closed" : cfg.method;
    if (cfg.n_min > cfg.n_max)
        throw domain_error("moments: n-min exceeds n-max");
    // Shifted grid: keeps the critical branch point off the nodes.  At k = 1
    // the integrand has a cusp and the trapezoid rule converges at reduced
    // order, so the grid is denser there.
    const int Mq = (k_eff == 1.0) ? 65536 : 4096;
    const auto g = circle_grid(Mq, pi / Mq);
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        Record rec;
        rec.N = n;
        rec.k = k;
        double closed = 0.0, quad = 0.0;
        if (method != "quadrature") closed = moment_closed(n, k_eff);
        if (method != "closed") quad = moment_quadrature(n, k_eff, g);
        if (method == "both") {
            const double dev = std::abs(closed - quad) /
                               std::max({std::abs(closed), std::abs(quad), 1e-12});
            if (dev > cfg.tol) {
                err << "moments: routes disagree at n = " << n << " (relative "
                    << num17(dev) << " > " << num17(cfg.tol) << ")\n";
                return 2;
            }
            rec.value = closed;
            rec.est_error = std::max(1e-15 * (1.0 + std::abs(closed)),
                                     std::abs(closed - quad));
        } else if (method == "closed") {
            rec.value = closed;
            rec.est_error = 1e-15 * (1.0 + std::abs(closed));
        } else {
            rec.value = quad;
            rec.est_error = 1e-13 * (1.0 + std::abs(quad));
        }
        rec.method = (cfg.dual ? "dual-" : "") + method;
        em.add(rec);
    }
    return 0;
}

int run_sweep(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    if (cfg.steps < 1) throw domain_error("sweep: need at least one grid point");
    if (!(cfg.k_min > 0.0) || !(cfg.k_max >= cfg.k_min))
        throw domain_error("sweep: need 0 < k-min <= k-max");
    if (cfg.family == "nextdiag" && !cfg.S)
        throw domain_error("sweep: the nextdiag family needs --S");
    for (int i = 0; i < cfg.steps; ++i) {
        const double k = cfg.steps == 1
                             ? cfg.k_min
                             : cfg.k_min + i * (cfg.k_max - cfg.k_min) / (cfg.steps - 1);
        Record rec;
        rec.N = cfg.N;
        rec.k = k;
        if (cfg.family == "diag") {
            const std::string method = cfg.method.empty() ? "recurrence" : cfg.method;
            const auto r = diag_corr(cfg.N, k, parse_method(method));
            rec.value = r.value;
            rec.method = method;
            rec.est_error = r.diagnostics.est_error;
        } else {
            const double S = *cfg.S;
            const double Sbar = k / S;
            rec.S = S;
            rec.Sbar = Sbar;
            if (on_isotropic_line(S, k)) {
                const auto r = nextdiag_isotropic_limit(cfg.N, ising_params(S, S));
                rec.value = r.value;
                rec.method = "isotropic-limit";
                rec.est_error = r.diagnostics.est_error;
            } else {
                const std::string method =
                    cfg.method.empty() ? "epsilon-recurrence" : cfg.method;
                const auto r =
                    nextdiag_corr(cfg.N, ising_params(S, Sbar), parse_method(method));
                check_node_budget(r, cfg.nodes_cap);
                rec.value = r.value;
                rec.method = method;
                rec.imag_residue = r.diagnostics.imag_residue;
                rec.est_error = r.diagnostics.est_error;
            }
        }
        em.add(rec);
    }
    (void)err;
    return 0;
}

int run_validate(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    const double k = cfg.critical ? 1.0 : cfg.k;
    const double S = cfg.S ? *cfg.S : std::sqrt(k);
    const double Sbar = k / S;
    auto rep = cross_validate(cfg.N_max, ising_params(S, Sbar), cfg.tol);
    if (cfg.perturb && !rep.rows.empty()) {
        // Test hook: corrupt one evaluation to prove the failure path fires.
        auto& row = rep.rows.front();
        if (!row.next_diagonal.empty())
            row.next_diagonal.front().value += 1e-3;
        else if (!row.diagonal.empty())
            row.diagonal.front().value += 1e-3;
        row.diag_max_dev = detail::pairwise_max_dev(row.diagonal);
        row.nextdiag_max_dev = detail::pairwise_max_dev(row.next_diagonal);
        rep.ok = true;
        rep.agreement_horizon = 0;
        rep.worst_deviation = 0.0;
        for (const auto& r : rep.rows) {
            rep.worst_deviation = std::max(
                {rep.worst_deviation, r.diag_max_dev, r.nextdiag_max_dev});
            if (rep.ok && r.notes.empty() && r.diag_max_dev <= rep.tolerance &&
                r.nextdiag_max_dev <= rep.tolerance)
                rep.agreement_horizon = r.N;
            else
                rep.ok = false;
        }
    }
    for (const auto& row : rep.rows) {
        for (const auto& mv : row.diagonal) {
            Record rec;
            rec.N = row.N;
            rec.k = k;
            rec.value = mv.value;
            rec.method = std::string("diagonal/") + method_name(mv.method);
            rec.est_error = row.diag_max_dev;
            em.add(rec);
        }
        for (const auto& mv : row.next_diagonal) {
            Record rec;
            rec.N = row.N;
            rec.k = k;
            rec.S = S;
            rec.Sbar = Sbar;
            rec.value = mv.value;
            rec.method = row.isotropic_limit
                             ? std::string("next-diagonal/isotropic-limit")
                             : std::string("next-diagonal/") + method_name(mv.method);
            rec.est_error = row.nextdiag_max_dev;
            em.add(rec);
        }
        for (const auto& note : row.notes)
            err << "validate: N = " << row.N << ": " << note << '\n';
    }
    err << "validate: " << (rep.ok ? "ok" : "FAILED") << ", agreement horizon "
        << rep.agreement_horizon << ", worst relative deviation "
        << num17(rep.worst_deviation) << '\n';
    return rep.ok ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spin-spin correlations of the anisotropic square-lattice Ising "
                 "model along and next to the lattice diagonal"};
    app.require_subcommand(0, 1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool with_S) {
        auto* k_opt = sub->add_option("--k", cfg.k,
                                      "Modulus k = sinh(2K) sinh(2Kbar); required "
                                      "unless --critical is given");
        k_opt->check(CLI::PositiveNumber);
        sub->add_flag("--critical", cfg.critical, "Evaluate on the critical line k = 1")
            ->excludes(k_opt);
        if (with_S)
            sub->add_option("--S", cfg.S, "First coupling sinh(2K); Sbar follows as k/S")
                ->check(CLI::PositiveNumber);
        sub->add_option("--tol", cfg.tol, "Method-agreement tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--nodes-cap", cfg.nodes_cap,
                        "Largest contour node count a record may report")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--output", cfg.output, "Write records to this path "
                                                "instead of standard output");
        return k_opt;
    };

    auto* diag = app.add_subcommand("diag", "Diagonal correlations for N = 1..N");
    add_common(diag, false);
    diag->add_option("--N", cfg.N, "Largest separation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    diag->add_option("--method", cfg.method, "Evaluation route")
        ->check(CLI::IsMember({"recurrence", "determinant", "critical-closed-form",
                               "both"}));

    auto* nextdiag =
        app.add_subcommand("nextdiag", "Next-to-diagonal correlations for N = 1..N");
    add_common(nextdiag, true);
    nextdiag->get_option("--S")->required();
    nextdiag->add_option("--N", cfg.N, "Largest separation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    nextdiag->add_option("--method", cfg.method, "Evaluation route")
        ->check(CLI::IsMember({"epsilon-recurrence", "determinant", "elliptic",
                               "critical-closed-form", "both"}));

    auto* moments = app.add_subcommand("moments", "Symbol moments a_n");
    add_common(moments, false);
    moments->add_option("--n-min", cfg.n_min, "Lowest moment index")
        ->capture_default_str();
    moments->add_option("--n-max", cfg.n_max, "Highest moment index")
        ->capture_default_str();
    moments->add_flag("--dual", cfg.dual, "Emit the dual moments (modulus 1/k)");
    moments->add_option("--method", cfg.method, "Evaluation route")
        ->check(CLI::IsMember({"closed", "quadrature", "both"}));

    auto* sweep = app.add_subcommand("sweep", "One record per point of a k grid");
    sweep->add_option("--family", cfg.family, "Observable family")
        ->check(CLI::IsMember({"diag", "nextdiag"}))
        ->capture_default_str();
    sweep->add_option("--N", cfg.N, "Separation")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--k-min", cfg.k_min, "Grid start")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--k-max", cfg.k_max, "Grid end")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--steps", cfg.steps, "Number of grid points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--S", cfg.S, "First coupling, fixed across the sweep "
                                    "(nextdiag family)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--method", cfg.method, "Evaluation route");
    sweep->add_option("--tol", cfg.tol, "Method-agreement tolerance")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--nodes-cap", cfg.nodes_cap,
                      "Largest contour node count a record may report")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sweep->add_option("--output", cfg.output, "Write records to this path");

    auto* validate = app.add_subcommand(
        "validate", "Cross-validate every applicable route and report agreement");
    add_common(validate, true);
    validate->add_option("--N-max", cfg.N_max, "Validate separations up to this N")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    validate->add_flag("--perturb", cfg.perturb)->group("");  // test hook, hidden

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 64;
    }

    CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0];
    if (!sub) {
        err << app.help();
        return 64;
    }
    // Sweeps carry their own grid; every other subcommand needs a modulus.
    if (sub != sweep && !cfg.critical && sub->count("--k") == 0) {
        err << "error: --k is required unless --critical is given\n" << app.help();
        return 64;
    }
    if (sub == sweep && !cfg.method.empty()) {
        const bool diag_m = cfg.method == "recurrence" || cfg.method == "determinant" ||
                            cfg.method == "critical-closed-form";
        const bool nd_m = cfg.method == "epsilon-recurrence" ||
                          cfg.method == "determinant" || cfg.method == "elliptic";
        if ((cfg.family == "diag" && !diag_m) || (cfg.family == "nextdiag" && !nd_m)) {
            err << "error: method '" << cfg.method << "' does not apply to the "
                << cfg.family << " family\n" << app.help();
            return 64;
        }
    }

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) {
            err << "error: cannot open output path " << cfg.output << '\n';
            return 1;
        }
    }
    Emitter em(cfg.output.empty() ? out : file, cfg.format);

    try {
        int rc = 1;
        if (sub == diag) rc = run_diag(cfg, em, err);
        else if (sub == nextdiag) rc = run_nextdiag(cfg, em, err);
        else if (sub == moments) rc = run_moments(cfg, em, err);
        else if (sub == sweep) rc = run_sweep(cfg, em, err);
        else if (sub == validate) rc = run_validate(cfg, em, err);
        if (rc == 0) em.finish();
        return rc;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace isingcorr
