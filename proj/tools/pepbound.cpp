// pepbound: run eigenvector error-bound experiments, self-checks and the
// reference-spectrum oracle from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <pepbound/bench.hpp>

namespace {

enum Exit { kOk = 0, kNumerical = 1, kUsage = 2 };

std::optional<pepbound::LinearizationLabel> parse_linearization(const std::string& s) {
    if (s == "l1") return pepbound::LinearizationLabel::L1;
    if (s == "l2") return pepbound::LinearizationLabel::L2;
    if (s == "l3") return pepbound::LinearizationLabel::L3;
    return std::nullopt;
}

pepbound::PolySpec poly_spec(const std::string& poly, std::size_t n, std::size_t d, std::uint64_t seed) {
    pepbound::PolySpec spec;
    spec.n = n;
    spec.d = d;
    spec.seed = seed;
    if (poly == "p1") {
        spec.kind = pepbound::PolyKind::P1;
    } else if (poly == "p2") {
        spec.kind = pepbound::PolyKind::P2;
    } else {
        spec.kind = pepbound::PolyKind::File;
        spec.path = poly;
    }
    return spec;
}

void print_summary(const pepbound::ExperimentReport& rep) {
    std::size_t flagged = 0;
    for (const auto& r : rep.rows) flagged += pepbound::row_is_flagged(r);
    std::printf("poly=%s linearization=%s seed=%llu n=%zu d=%zu (eps=%zu, eta=%zu)\n", rep.metadata.poly.c_str(),
                rep.metadata.linearization.c_str(), static_cast<unsigned long long>(rep.metadata.seed),
                rep.metadata.n, rep.metadata.d, rep.metadata.eps, rep.metadata.eta);
    std::printf("rows=%zu flagged=%zu excluded=%zu bound_violations=%zu\n", rep.rows.size(), flagged, rep.excluded,
                pepbound::bound_violations(rep.rows));
    if (const auto m = pepbound::median_tightness(rep.rows))
        std::printf("median bound/error ratio=%.3g\n", *m);
    std::printf("wall time %.2f s\n", rep.metadata.wallSeconds);
    for (const auto& d : rep.diagnostics) std::printf("note: %s\n", d.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvector error bounds for block Kronecker linearizations of matrix polynomials"};
    app.require_subcommand(1);

    std::string poly = "p1", lin = "l1", out, plot;
    std::uint64_t seed = 0;
    std::size_t n = 10, d = 5;
    bool no_parallel = false;

    auto* run = app.add_subcommand("run", "Solve one test problem and write the per-eigenvector table");
    run->add_option("--poly", poly, "Test polynomial: p1, p2 or a JSON polynomial file")->capture_default_str();
    run->add_option("--linearization", lin, "Linearization: l1 (Frobenius), l2 or l3")->capture_default_str();
    run->add_option("--seed", seed, "Random seed for p1/p2")->capture_default_str();
    run->add_option("--d", d, "Degree of p1 (p2 is fixed at 5)")->capture_default_str();
    run->add_option("--n", n, "Coefficient size")->capture_default_str();
    run->add_option("--out", out, "CSV output path")->required();
    run->add_option("--plot", plot, "Optional SVG plot path");
    run->add_flag("--no-parallel", no_parallel, "Process eigenpairs sequentially");

    auto* verify = app.add_subcommand("verify", "Check the factorization, oracle and bound identities on a random instance");
    verify->add_option("--seed", seed, "Random seed")->capture_default_str();
    verify->add_option("--d", d, "Degree")->capture_default_str();
    verify->add_option("--n", n, "Coefficient size")->capture_default_str();
    verify->add_flag("--no-parallel", no_parallel, "Process eigenpairs sequentially");

    auto* oracle = app.add_subcommand("oracle", "Write the reference spectrum of a test polynomial to a JSON cache");
    oracle->add_option("--poly", poly, "Test polynomial: p1, p2 or a JSON polynomial file")->capture_default_str();
    oracle->add_option("--seed", seed, "Random seed for p1/p2")->capture_default_str();
    oracle->add_option("--d", d, "Degree of p1")->capture_default_str();
    oracle->add_option("--n", n, "Coefficient size")->capture_default_str();
    oracle->add_option("--out", out, "JSON output path")->required();
    oracle->add_flag("--no-parallel", no_parallel, "Refine eigenpairs sequentially");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (run->parsed()) {
            const auto label = parse_linearization(lin);
            if (!label) {
                std::cerr << "error: unknown linearization '" << lin << "' (expected l1, l2 or l3)\n";
                return kUsage;
            }
            pepbound::ExperimentConfig cfg;
            cfg.poly = poly_spec(poly, n, d, seed);
            cfg.linearization = *label;
            cfg.seed = seed;
            cfg.outCsv = out;
            if (!plot.empty()) cfg.outPlot = plot;
            cfg.parallel = !no_parallel;
            const auto rep = pepbound::run_experiment(cfg);
            pepbound::emit_csv(rep, cfg.outCsv);
            if (cfg.outPlot) pepbound::emit_plot(rep, *cfg.outPlot);
            print_summary(rep);
            return kOk;
        }
        if (verify->parsed()) {
            const auto checks = pepbound::run_invariant_suite(seed, d, n, !no_parallel);
            bool ok = true;
            for (const auto& c : checks) {
                std::printf("%s %s [%s]\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
                ok = ok && c.pass;
            }
            return ok ? kOk : kNumerical;
        }
        if (oracle->parsed()) {
            pepbound::ExperimentConfig cfg;
            cfg.poly = poly_spec(poly, n, d, seed);
            cfg.seed = seed;
            const auto p = pepbound::build_polynomial(cfg);
            pepbound::SpectrumOptions so;
            so.parallel = !no_parallel;
            const auto refs = pepbound::reference_spectrum(p, std::nullopt, so);
            pepbound::json key{{"poly", poly}, {"seed", seed}, {"n", p.n()}, {"d", p.grade()}};
            pepbound::save_reference_cache(p, refs, key, out);
            std::size_t converged = 0;
            for (const auto& r : refs) converged += r.converged;
            std::printf("wrote %zu reference eigenpairs (%zu converged) to %s\n", refs.size(), converged,
                        out.c_str());
            return converged == refs.size() ? kOk : kNumerical;
        }
    } catch (const pepbound::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const pepbound::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const pepbound::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const pepbound::DomainError& e) {
        // unsupported (degree, linearization) combinations and similar
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const pepbound::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
