#pragma once

// Experiment driver: build a test polynomial, linearize, solve, recover the
// eigenvectors, compare against the reference spectrum and evaluate the
// error bounds. Emits CSV tables and SVG scatter plots.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "denseig.hpp"
#include "io.hpp"
#include "kronlin.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "polyval.hpp"

namespace pepbound {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : Error {
    using Error::Error;
};

struct ExperimentConfig {
    PolySpec poly;  // PolyKind::File reads poly.path
    LinearizationLabel linearization = LinearizationLabel::L1;
    std::uint64_t seed = 0;  // overrides poly.seed
    std::string outCsv;
    std::optional<std::string> outPlot;
    bool parallel = true;
};

struct ExperimentReport {
    struct Metadata {
        std::string poly;
        std::string linearization;
        std::uint64_t seed = 0;
        std::size_t n = 0;
        std::size_t d = 0;
        std::size_t eps = 0;
        std::size_t eta = 0;
        std::string version = kVersion;
        double wallSeconds = 0.0;
    };

    std::vector<BoundRow> rows;  // sorted by |lambda~| ascending, index 1-based
    Metadata metadata;
    std::vector<std::string> diagnostics;
    std::size_t excluded = 0;  // eigenvalues without a row (infinite or failed)
};

inline std::string to_string(PolyKind k) {
    switch (k) {
        case PolyKind::P1: return "p1";
        case PolyKind::P2: return "p2";
        case PolyKind::File: return "file";
    }
    return "file";
}

inline std::string flags_to_string(unsigned flags) {
    std::string s;
    auto add = [&](unsigned bit, const char* name) {
        if (!(flags & bit)) return;
        if (!s.empty()) s += '|';
        s += name;
    };
    add(row_flags::ambiguous_pairing, "ambiguous_pairing");
    add(row_flags::sep_zero, "sep_zero");
    add(row_flags::oracle_unconverged, "oracle_unconverged");
    add(row_flags::numerical_failure, "numerical_failure");
    return s;
}

/// The scaled polynomial described by a config.
inline MatrixPolynomial build_polynomial(const ExperimentConfig& cfg) {
    if (cfg.poly.kind == PolyKind::File) return scale_max_norm(load_polynomial(cfg.poly.path)).first;
    PolySpec spec = cfg.poly;
    spec.seed = cfg.seed;
    return random_polynomial(spec);
}

namespace detail {

struct Pairing {
    std::size_t ref = 0;
    bool ambiguous = false;
};

inline Pairing nearest_reference(cplx lambda, const std::vector<RefEigenpair>& refs) {
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    Pairing p;
    for (std::size_t j = 0; j < refs.size(); ++j) {
        const double dist = std::abs(refs[j].lambda_double() - lambda);
        if (dist < d1) {
            d2 = d1;
            d1 = dist;
            p.ref = j;
        } else if (dist < d2) {
            d2 = dist;
        }
    }
    // two references (almost) equally close: the pairing is not meaningful
    p.ambiguous = (d2 - d1) <= 1e-8 * std::abs(refs[p.ref].lambda_double());
    return p;
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const MatrixPolynomial& p,
                                       const std::vector<RefEigenpair>& refs) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.metadata.poly = cfg.poly.kind == PolyKind::File ? cfg.poly.path : to_string(cfg.poly.kind);
    rep.metadata.linearization = to_string(cfg.linearization);
    rep.metadata.seed = cfg.seed;
    rep.metadata.n = p.n();
    rep.metadata.d = p.grade();

    const BlockKroneckerForm form = preset_linearization(p, cfg.linearization);
    rep.metadata.eps = form.eps;
    rep.metadata.eta = form.eta;
    const Pencil l = assemble(p, form);
    const auto ev = eigenvalues(generalized_schur(l.A, l.B));
    const std::size_t d = p.grade();

    struct Outcome {
        std::optional<BoundRow> row;
        std::size_t ref = 0;
        std::string note;
    };
    auto outcomes = parallel_map(
        ev.size(),
        [&](std::size_t k) {
            Outcome o;
            const cplx lam = ev[k].lambda;
            if (ev[k].infinite) {
                o.note = "eigenvalue " + std::to_string(k) + " is infinite; excluded";
                return o;
            }
            BoundRow row;
            row.lambdaComputed = lam;
            const detail::Pairing pair = detail::nearest_reference(lam, refs);
            const RefEigenpair& ref = refs[pair.ref];
            o.ref = pair.ref;
            row.lambdaExact = ref.lambda_double();
            if (pair.ambiguous || ref.clustered) row.flags |= row_flags::ambiguous_pairing;
            if (!ref.converged) row.flags |= row_flags::oracle_unconverged;
            try {
                const ComplexVector v = inverse_iteration_vector(l.A, l.B, lam);
                const ComplexVector xt = recover_eigenvector(v, p, form, lam);
                row.residual = residual_norm_extended(p, lam, xt);
                row.sinAngle = sin_acute_angle_extended(xt, ref.x);
                row.gNorm = norm2(FactorPair(form, variant_for(lam)).g(lam));

                const cplx lam0 = row.lambdaExact;
                const ComplexVector v0 = FactorPair(form, variant_for(lam0)).H(lam0) * ref.x_double();
                const SepResult s = separation(l.A, l.B, v0, lam);
                row.sep = s.sep;
                if (s.sepUnderflow || s.sep == 0.0) row.flags |= row_flags::sep_zero;
                row.boundKron = pep_bound_kronecker(row.residual, lam, d, row.sep);
                row.boundFrob = pep_bound_frobenius(row.residual, lam, d, row.sep);
            } catch (const Error& e) {
                row.flags |= row_flags::numerical_failure;
                row.boundKron = row.boundFrob = std::numeric_limits<double>::quiet_NaN();
                o.note = "eigenvalue " + std::to_string(k) + ": " + e.what();
            }
            o.row = row;
            return o;
        },
        cfg.parallel);

    std::vector<std::size_t> uses(refs.size(), 0);
    for (const auto& o : outcomes)
        if (o.row) ++uses[o.ref];
    for (auto& o : outcomes) {
        if (!o.note.empty()) rep.diagnostics.push_back(o.note);
        if (!o.row) {
            ++rep.excluded;
            continue;
        }
        if (uses[o.ref] > 1) o.row->flags |= row_flags::ambiguous_pairing;
        rep.rows.push_back(*o.row);
    }
    for (std::size_t j = 0; j < refs.size(); ++j)
        if (!refs[j].converged)
            rep.diagnostics.push_back("reference " + std::to_string(j) + " did not converge" +
                                      (refs[j].failure.empty() ? "" : ": " + refs[j].failure));
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const BoundRow& a, const BoundRow& b) {
        return std::abs(a.lambdaComputed) < std::abs(b.lambdaComputed);
    });
    for (std::size_t i = 0; i < rep.rows.size(); ++i) rep.rows[i].index = i + 1;
    rep.metadata.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Full pipeline including polynomial construction and the reference spectrum.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const MatrixPolynomial p = build_polynomial(cfg);
    SpectrumOptions so;
    so.parallel = cfg.parallel;
    const auto refs = reference_spectrum(p, std::nullopt, so);
    ExperimentReport rep = run_experiment(cfg, p, refs);
    rep.metadata.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline bool row_is_flagged(const BoundRow& r) { return r.flags != 0; }

/// Median of boundKron / sinAngle over unflagged rows with a measurable angle.
inline std::optional<double> median_tightness(const std::vector<BoundRow>& rows, double min_angle = 1e-15) {
    std::vector<double> ratios;
    for (const auto& r : rows)
        if (!row_is_flagged(r) && r.sinAngle > min_angle && std::isfinite(r.boundKron))
            ratios.push_back(r.boundKron / r.sinAngle);
    if (ratios.empty()) return std::nullopt;
    std::sort(ratios.begin(), ratios.end());
    const std::size_t m = ratios.size();
    return m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

/// Rows (unflagged) where the computed error exceeds the Kronecker bound.
inline std::size_t bound_violations(const std::vector<BoundRow>& rows, double slack = 1e-15) {
    std::size_t bad = 0;
    for (const auto& r : rows)
        if (!row_is_flagged(r) && !(r.sinAngle <= r.boundKron + slack)) ++bad;
    return bad;
}

// --- output -------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "index,lambda_re,lambda_im,abs_lambda,residual,sep,sin_angle,bound_kron,bound_frob,ratio,flags";

inline std::string to_csv(const ExperimentReport& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << kCsvHeader << '\n';
    for (const auto& r : rep.rows) {
        os << r.index << ',' << r.lambdaComputed.real() << ',' << r.lambdaComputed.imag() << ','
           << std::abs(r.lambdaComputed) << ',' << r.residual << ',' << r.sep << ',' << r.sinAngle << ','
           << r.boundKron << ',' << r.boundFrob << ',' << r.boundKron / r.boundFrob << ','
           << flags_to_string(r.flags) << '\n';
    }
    return os.str();
}

inline void emit_csv(const ExperimentReport& rep, const std::string& path) {
    detail::write_text_file(path, to_csv(rep));
}

/// Log-scale scatter of error and bound against eigenvector index.
inline std::string to_svg(const ExperimentReport& rep) {
    if (rep.rows.empty()) throw DomainError("emit_plot: report has no rows");
    constexpr double width = 720, height = 440, left = 70, right = 150, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : rep.rows)
        for (double v : {r.sinAngle, r.boundKron})
            if (v > 0.0 && std::isfinite(v)) lo = std::min(lo, std::log10(v)), hi = std::max(hi, std::log10(v));
    if (!std::isfinite(lo)) lo = -16.0, hi = 0.0;
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;

    const std::size_t count = rep.rows.size();
    auto xpos = [&](std::size_t index) {
        return count == 1 ? left + pw / 2 : left + pw * static_cast<double>(index - 1) / static_cast<double>(count - 1);
    };
    // zero errors sit on the bottom edge, infinite bounds on the top edge
    auto ypos = [&](double v) {
        double e = v > 0.0 ? (std::isfinite(v) ? std::log10(v) : hi) : lo;
        if (std::isnan(v)) e = hi;
        e = std::clamp(e, lo, hi);
        return top + ph * (hi - e) / (hi - lo);
    };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << "Eigenvector error and upper bound (" << rep.metadata.poly << ", " << rep.metadata.linearization
       << ")</text>\n";
    // grid and y ticks per decade
    for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
        const double y = top + ph * (hi - e) / (hi - lo);
        os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
           << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    const std::size_t step = std::max<std::size_t>(1, count / 10);
    for (std::size_t i = 1; i <= count; i += step)
        os << "<text x=\"" << xpos(i) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << i
           << "</text>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\">eigenvector index</text>\n";
    os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << top + ph / 2 << ")\">log10 scale</text>\n";

    for (const auto& r : rep.rows) {
        os << "<circle class=\"bound\" data-index=\"" << r.index << "\" cx=\"" << xpos(r.index) << "\" cy=\""
           << ypos(r.boundKron) << "\" r=\"4\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
        os << "<circle class=\"error\" data-index=\"" << r.index << "\" cx=\"" << xpos(r.index) << "\" cy=\""
           << ypos(r.sinAngle) << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    }
    const double lx = left + pw + 15;
    os << "<circle cx=\"" << lx << "\" cy=\"" << top + 10 << "\" r=\"4\" fill=\"none\" stroke=\"#d62728\" "
       << "stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << lx + 10 << "\" y=\"" << top + 14 << "\">upper bound</text>\n";
    os << "<circle cx=\"" << lx << "\" cy=\"" << top + 30 << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    os << "<text x=\"" << lx + 10 << "\" y=\"" << top + 34 << "\">sin angle(x, x~)</text>\n";
    os << "</svg>\n";
    return os.str();
}

inline void emit_plot(const ExperimentReport& rep, const std::string& path) {
    detail::write_text_file(path, to_svg(rep));
}

// --- invariant suite ------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Self-check of the main identities on one random instance of size (d, n).
inline std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, std::size_t d, std::size_t n,
                                                    bool parallel = true) {
    std::vector<CheckResult> out;
    auto record = [&](std::string name, bool pass, double value) {
        std::ostringstream os;
        os << std::setprecision(3) << value;
        out.push_back({std::move(name), pass, os.str()});
    };
    if (d < 1 || n < 1) throw ConfigError("verify: d and n must be positive");
    PolySpec spec;
    spec.kind = PolyKind::P1;
    spec.n = n;
    spec.d = d;
    spec.seed = seed;
    const MatrixPolynomial p = random_polynomial(spec);

    GaussianStream gauss(seed + 1);
    auto random_block = [&](std::size_t r, std::size_t c) {
        ComplexMatrix m(r, c);
        for (auto& z : m.entries()) z = gauss.next_complex();
        return m;
    };
    std::vector<cplx> samples(20);
    for (auto& s : samples) s = gauss.next_complex();

    // forms: Frobenius plus one corrected form per split of the degree
    std::vector<BlockKroneckerForm> forms{preset_linearization(p, LinearizationLabel::L1)};
    for (std::size_t eps = 0; eps < d; ++eps) {
        const std::size_t eta = d - 1 - eps;
        MPencil m = make_m_pencil(p, eps, eta, random_block((eta + 1) * n, eps * n), random_block(eta * n, (eps + 1) * n));
        forms.push_back({eps, eta, n, std::move(m), identity_permutation(d), identity_permutation(d),
                         LinearizationLabel::Custom});
    }

    double worst_fact = 0.0, worst_induced = 0.0, worst_resid = 0.0;
    bool sums_ok = true;
    for (const auto& f : forms) {
        const Pencil l = assemble(p, f);
        for (auto variant : {FactorVariant::H1, FactorVariant::H2}) {
            const auto rep = verify_right_sided_factorization(l, FactorPair(f, variant), p, samples);
            worst_fact = std::max(worst_fact, rep.worstResidual);
            if (!rep.pass) worst_fact = std::max(worst_fact, 1.0);
        }
        const MatrixPolynomial q = induced_polynomial(f.M, f.eps, f.eta);
        double scale = 0.0, diff = 0.0;
        for (std::size_t i = 0; i <= d; ++i) {
            scale = std::max(scale, frobenius_norm(p[i]));
            diff = std::max(diff, frobenius_norm(q[i] - p[i]));
        }
        worst_induced = std::max(worst_induced, diff / scale);
        sums_ok = sums_ok && check_antidiagonal_sums(f.M, p);

        for (const cplx lam : samples) {
            const FactorPair fp(f, variant_for(lam));
            ComplexVector x(n);
            for (auto& z : x) z = gauss.next_complex();
            x = normalized(x);
            const double lhs = residual_norm(p, lam, x) * norm2(fp.g(lam));
            const double rhs = norm2(l.eval(lam) * (fp.H(lam) * x));
            worst_resid = std::max(worst_resid, std::abs(lhs - rhs) / std::max(lhs, 1e-300));
        }
    }
    record("right-sided factorizations L H = g (x) P", worst_fact <= 1e-12, worst_fact);
    record("induced polynomial reproduces P", worst_induced <= 1e-13, worst_induced);
    record("anti-diagonal sums hold for constructed M", sums_ok, sums_ok ? 0.0 : 1.0);
    record("residual relation |P x| |g| = |L H x|", worst_resid <= 1e-12, worst_resid);

    SpectrumOptions so;
    so.parallel = parallel;
    const auto refs = reference_spectrum(p, std::nullopt, so);
    std::size_t converged = 0;
    double worst_ref = 0.0;
    for (const auto& r : refs) {
        converged += r.converged;
        if (r.converged) worst_ref = std::max(worst_ref, r.residual / max_coefficient_norm(p));
    }
    record("reference eigenpairs converged (" + std::to_string(converged) + "/" + std::to_string(refs.size()) + ")",
           converged == refs.size(), worst_ref);

    double worst_corr = 0.0;
    for (const auto& f : forms) {
        const Pencil l = assemble(p, f);
        for (const auto& r : refs) {
            const cplx lam = r.lambda_double();
            const ComplexVector hx = FactorPair(f, variant_for(lam)).H(lam) * r.x_double();
            const ComplexMatrix ll = l.eval(lam);
            worst_corr = std::max(worst_corr, norm2(ll * hx) / (frobenius_norm(ll) * norm2(hx)));
        }
    }
    record("eigenpair correspondence L(lambda) H(lambda) x = 0", worst_corr <= 1e-10, worst_corr);

    {
        const BlockKroneckerForm& f = forms.front();
        const Pencil l = assemble(p, f);
        double worst = 0.0;
        for (const auto& e : eigenvalues(generalized_schur(l.A, l.B))) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& r : refs)
                best = std::min(best, std::abs(e.lambda - r.lambda_double()) / std::abs(r.lambda_double()));
            worst = std::max(worst, best);
        }
        record("linearization eigenvalues match references", worst <= 1e-8, worst);
    }

    ExperimentConfig cfg;
    cfg.poly = spec;
    cfg.seed = seed;
    cfg.parallel = parallel;
    const ExperimentReport rep = run_experiment(cfg, p, refs);
    const std::size_t bad = bound_violations(rep.rows);
    record("bound validity sin <= Kronecker bound (" + std::to_string(rep.rows.size()) + " rows)", bad == 0,
           static_cast<double>(bad));
    double worst_bracket = 0.0;
    bool bracket_ok = true;
    for (const auto& r : rep.rows) {
        if (!(r.residual > 0.0) || row_is_flagged(r)) continue;
        const double ratio = r.boundKron / r.boundFrob;
        bracket_ok = bracket_ok && ratio >= 1.0 - 1e-12 && ratio <= std::sqrt(static_cast<double>(d)) + 1e-12;
        worst_bracket = std::max(worst_bracket, ratio);
    }
    record("ratio bracket 1 <= Kronecker/Frobenius <= sqrt(d)", bracket_ok, worst_bracket);
    return out;
}

}  // namespace pepbound
