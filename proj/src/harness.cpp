#include "nonlocal/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nonlocal/assembly.hpp"
#include "nonlocal/linalg.hpp"
#include "nonlocal/solver.hpp"

namespace nonlocal {

namespace {

// Equality test for the critical grading exponents (2/3, 2/(1+sigma), ...).
constexpr double kCriticalTol = 1e-9;

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

double parse_double(std::string_view text, const char* what) {
    const std::string s = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument(std::string("cannot parse ") + what + " from '" + s + "'");
    return value;
}

std::size_t parse_size(std::string_view text, const char* what) {
    const std::string s = trim(text);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument(std::string("cannot parse ") + what + " from '" + s + "'");
    return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(sep, start);
        const auto end = pos == std::string_view::npos ? text.size() : pos;
        parts.push_back(trim(text.substr(start, end - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_err(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4E", v);
    return buf;
}

std::string format_rate(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

bool is_evolution(Problem p) { return p == Problem::evolve_1d || p == Problem::evolve_2d; }

} // namespace

std::string to_string(Problem problem) {
    switch (problem) {
    case Problem::steady_smooth: return "steady_smooth";
    case Problem::steady_singular: return "steady_singular";
    case Problem::evolve_1d: return "evolve_1d";
    case Problem::evolve_2d: return "evolve_2d";
    case Problem::spectrum: return "spectrum";
    }
    return "unknown";
}

Problem parse_problem(std::string_view text) {
    const std::string s = trim(text);
    for (Problem p : {Problem::steady_smooth, Problem::steady_singular, Problem::evolve_1d,
                      Problem::evolve_2d, Problem::spectrum})
        if (s == to_string(p))
            return p;
    throw std::invalid_argument("unknown problem '" + s + "'");
}

std::string to_string(SolutionKind kind) {
    return kind == SolutionKind::smooth ? "smooth" : "singular";
}

SolutionKind parse_solution(std::string_view text) {
    const std::string s = trim(text);
    if (s == "smooth")
        return SolutionKind::smooth;
    if (s == "singular")
        return SolutionKind::singular;
    throw std::invalid_argument("unknown solution '" + s + "', expected smooth|singular");
}

TableFormat parse_format(std::string_view text) {
    const std::string s = trim(text);
    if (s == "csv")
        return TableFormat::csv;
    if (s == "markdown" || s == "md")
        return TableFormat::markdown;
    throw std::invalid_argument("unknown format '" + s + "', expected csv|markdown");
}

SolutionKind StudyConfig::effective_solution() const noexcept {
    switch (problem) {
    case Problem::steady_smooth: return SolutionKind::smooth;
    case Problem::steady_singular: return SolutionKind::singular;
    default: return solution;
    }
}

void StudyConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("study: alpha must lie in (0, 1)");
    const double b = effective_beta();
    if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("study: beta must lie in (0, 1)");
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("study: sigma must lie in (0, 1)");
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("study: grading exponent r must be positive");
    if (n_list.empty())
        throw std::invalid_argument("study: N list is empty");
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        if (n_list[k] < 1)
            throw std::invalid_argument("study: N must be at least 1");
        if (k > 0 && n_list[k] <= n_list[k - 1])
            throw std::invalid_argument("study: N list must be strictly increasing");
    }
    if (is_evolution(problem) && !steps.equal_n && steps.fixed < 1)
        throw std::invalid_argument("study: fixed M must be at least 1");
    if (!(final_time > 0.0))
        throw std::invalid_argument("study: final time must be positive");
    if (quad_nodes < 1)
        throw std::invalid_argument("study: quadrature node count must be positive");
    if (!(krylov_tol > 0.0))
        throw std::invalid_argument("study: Krylov tolerance must be positive");
}

bool StudyResult::all_ok() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.ok(); });
}

double observed_rate(double err_coarse, double err_fine) {
    if (!(err_coarse > 0.0) || !(err_fine > 0.0))
        throw std::invalid_argument("observed_rate: errors must be positive");
    return std::log2(err_coarse / err_fine);
}

RateExpectation expected_rate_steady_smooth(double r) {
    if (!(r > 0.0))
        throw std::invalid_argument("expected_rate_steady_smooth: r must be positive");
    const double critical = 2.0 / 3.0;
    if (std::abs(r - critical) <= kCriticalTol)
        return {2.0 - critical, true};
    if (r > critical)
        return {2.0 - r, false};
    return {2.0 * r, false};
}

RateExpectation expected_rate_steady_singular(double r, double sigma) {
    if (!(r > 0.0))
        throw std::invalid_argument("expected_rate_steady_singular: r must be positive");
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("expected_rate_steady_singular: sigma must lie in (0, 1)");
    const double product = r * (1.0 + sigma);
    if (std::abs(product - 2.0) <= kCriticalTol)
        return {2.0 - r, true};
    if (product > 2.0)
        return {2.0 - r, false};
    return {r * sigma, false};
}

RateExpectation expected_rate_evolution(double r, double sigma, double alpha) {
    if (!(r > 0.0))
        throw std::invalid_argument("expected_rate_evolution: r must be positive");
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("expected_rate_evolution: sigma must lie in (0, 1]");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("expected_rate_evolution: alpha must lie in (0, 1)");
    const double spatial = r * (1.0 + sigma - alpha);
    if (std::abs(spatial - 2.0) <= kCriticalTol)
        return {2.0, true};
    return {std::min(spatial, 2.0), false};
}

RateExpectation expected_rate(const StudyConfig& config) {
    switch (config.problem) {
    case Problem::steady_smooth: return expected_rate_steady_smooth(config.r);
    case Problem::steady_singular: return expected_rate_steady_singular(config.r, config.sigma);
    case Problem::evolve_1d:
    case Problem::evolve_2d: {
        // the smooth profile vanishes linearly at both ends, i.e. sigma = 1
        const double sigma =
            config.effective_solution() == SolutionKind::smooth ? 1.0 : config.sigma;
        return expected_rate_evolution(config.r, sigma, config.alpha);
    }
    case Problem::spectrum: break;
    }
    throw std::invalid_argument("expected_rate: spectrum studies have no convergence rate");
}

double optimal_grading(const StudyConfig& config) {
    switch (config.problem) {
    case Problem::steady_smooth: return 2.0 / 3.0;
    case Problem::steady_singular: return 2.0 / (1.0 + config.sigma);
    case Problem::evolve_1d:
    case Problem::evolve_2d:
        if (config.effective_solution() == SolutionKind::smooth)
            return 2.0 / (2.0 - config.alpha);
        return 2.0 / (1.0 + config.sigma - config.alpha);
    case Problem::spectrum: return 1.0;
    }
    return 1.0;
}

double parse_grading(std::string_view text, const StudyConfig& config) {
    const std::string s = trim(text);
    if (s == "opt")
        return optimal_grading(config);
    const auto slash = s.find('/');
    double value;
    if (slash != std::string::npos) {
        const double num = parse_double(std::string_view(s).substr(0, slash), "grading numerator");
        const double den = parse_double(std::string_view(s).substr(slash + 1), "grading denominator");
        if (den == 0.0)
            throw std::invalid_argument("grading: zero denominator");
        value = num / den;
    } else {
        value = parse_double(s, "grading exponent");
    }
    if (!(value > 0.0))
        throw std::invalid_argument("grading exponent r must be positive");
    return value;
}

ConvergenceRow measure_row(const StudyConfig& config, std::size_t n) {
    ConvergenceRow row;
    row.n = n;
    const Domain1D domain{0.0, 1.0};
    const SolutionKind kind = config.effective_solution();
    const bool evolution = is_evolution(config.problem);
    const TimeProfile profile = evolution ? TimeProfile::exponential : TimeProfile::steady;
    const ManufacturedSolution ms = kind == SolutionKind::smooth
                                        ? ManufacturedSolution::smooth(domain, profile)
                                        : ManufacturedSolution::singular(config.sigma, domain, profile);
    const KernelParams params{config.alpha, config.effective_beta()};
    const GradedMesh mesh = build_graded_mesh(domain, n, config.r);
    const auto xs = mesh.interior_nodes();
    const std::size_t m = xs.size();

    switch (config.problem) {
    case Problem::steady_smooth:
    case Problem::steady_singular: {
        const auto a = assemble(mesh, config.alpha);
        Vector forcing(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i)
            forcing[static_cast<Eigen::Index>(i)] = forcing_steady(ms, params, xs[i], config.quad_nodes);
        const auto solved = solve_steady(a, forcing);
        double err = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            err = std::max(err, std::abs(solved.values[static_cast<Eigen::Index>(i)] - ms.spatial(xs[i])));
        row.max_err = err;
        return row;
    }
    case Problem::evolve_1d: {
        row.m = config.steps.steps_for(n);
        const TimeGrid grid{row.m, config.final_time};
        // u = e^t v(x) is separable, so f(x, t) = e^t f(x, 0)
        std::vector<double> base(m);
        for (std::size_t i = 0; i < m; ++i)
            base[i] = forcing_evolution(ms, params, xs[i], 0.0, config.quad_nodes);
        const NodalForcing f = [&base](double t, std::span<double> out) {
            const double scale = std::exp(t);
            for (std::size_t i = 0; i < base.size(); ++i)
                out[i] = scale * base[i];
        };
        double worst = 0.0;
        const StepObserver observer = [&](std::size_t, double t, const Vector& values) {
            if (config.error_norm != ErrorNorm::all_levels)
                return;
            for (std::size_t i = 0; i < m; ++i)
                worst = std::max(worst, std::abs(values[static_cast<Eigen::Index>(i)] - ms.value(xs[i], t)));
        };
        const auto solved = evolve_1d(mesh, config.alpha, grid, f, ms.spatial_function(), observer);
        if (config.error_norm == ErrorNorm::final_time) {
            for (std::size_t i = 0; i < m; ++i)
                worst = std::max(worst, std::abs(solved.values[static_cast<Eigen::Index>(i)] -
                                                 ms.value(xs[i], config.final_time)));
        }
        row.max_err = worst;
        return row;
    }
    case Problem::evolve_2d: {
        row.m = config.steps.steps_for(n);
        const TimeGrid grid{row.m, config.final_time};
        const SeparableForcing2D forcing(ms, ms, params, xs, xs, config.quad_nodes);
        const NodalForcing f = [&forcing](double t, std::span<double> out) { forcing.fill(t, out); };
        auto error_at = [&](const Vector& values, double t) {
            double e = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k = 0; k < m; ++k)
                    e = std::max(e, std::abs(values[static_cast<Eigen::Index>(i * m + k)] -
                                             forcing.exact(i, k, t)));
            return e;
        };
        double worst = 0.0;
        const StepObserver observer = [&](std::size_t, double t, const Vector& values) {
            if (config.error_norm == ErrorNorm::all_levels)
                worst = std::max(worst, error_at(values, t));
        };
        Evolve2DOptions options;
        options.tol = config.krylov_tol;
        const auto u0 = [&ms](double x, double y) { return ms.spatial(x) * ms.spatial(y); };
        const auto solved = evolve_2d(mesh, mesh, params, grid, f, u0, options, observer);
        if (config.error_norm == ErrorNorm::final_time)
            worst = error_at(solved.values, config.final_time);
        row.max_err = worst;
        return row;
    }
    case Problem::spectrum: break;
    }
    throw std::invalid_argument("measure_row: spectrum is not a convergence study");
}

StudyResult run_study(const StudyConfig& config) {
    config.validate();
    if (config.problem == Problem::spectrum)
        throw std::invalid_argument("run_study: use spectrum_study for spectrum problems");
    const auto start = std::chrono::steady_clock::now();
    const RateExpectation expected = expected_rate(config);

    StudyResult result;
    result.config = config;
    for (std::size_t n : config.n_list) {
        ConvergenceRow row;
        try {
            row = measure_row(config, n);
            if (!std::isfinite(row.max_err))
                row.status = "non-finite error";
        } catch (const std::exception& e) {
            row.n = n;
            row.m = is_evolution(config.problem) ? config.steps.steps_for(n) : 0;
            row.max_err = std::numeric_limits<double>::quiet_NaN();
            row.status = e.what();
        }
        row.expected_rate = expected.rate;
        row.log_factor = expected.log_factor;
        if (!result.rows.empty()) {
            const ConvergenceRow& prev = result.rows.back();
            if (prev.ok() && row.ok() && row.n == 2 * prev.n && prev.max_err > 0.0 && row.max_err > 0.0)
                row.observed_rate = observed_rate(prev.max_err, row.max_err);
        }
        result.rows.push_back(std::move(row));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (config.output)
        write_table(*config.output, config.format, {result});
    return result;
}

namespace {

constexpr const char* kCsvHeader =
    "problem,solution,alpha,beta,sigma,r,N,M,max_err,observed_rate,expected_rate,log_factor,status";

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    return s;
}

} // namespace

void write_csv(std::ostream& out, const std::vector<StudyResult>& studies) {
    out << kCsvHeader << '\n';
    for (const auto& study : studies) {
        const auto& c = study.config;
        for (const auto& row : study.rows) {
            out << to_string(c.problem) << ',' << to_string(c.effective_solution()) << ','
                << format_g17(c.alpha) << ',' << format_g17(c.effective_beta()) << ','
                << format_g17(c.sigma) << ',' << format_g17(c.r) << ',' << row.n << ',' << row.m
                << ',' << format_g17(row.max_err) << ','
                << (row.observed_rate ? format_g17(*row.observed_rate) : std::string()) << ','
                << format_g17(row.expected_rate) << ',' << (row.log_factor ? 1 : 0) << ','
                << sanitize(row.status) << '\n';
        }
    }
}

std::vector<StudyResult> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader)
        throw std::invalid_argument("read_csv: missing or unexpected header");
    std::vector<StudyResult> studies;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 13)
            throw std::invalid_argument("read_csv: expected 13 fields in '" + line + "'");
        StudyConfig c;
        c.problem = parse_problem(f[0]);
        c.solution = parse_solution(f[1]);
        c.alpha = parse_double(f[2], "alpha");
        c.beta = parse_double(f[3], "beta");
        c.sigma = parse_double(f[4], "sigma");
        c.r = parse_double(f[5], "r");
        ConvergenceRow row;
        row.n = parse_size(f[6], "N");
        row.m = parse_size(f[7], "M");
        row.max_err = f[8] == "nan" || f[8] == "-nan" ? std::numeric_limits<double>::quiet_NaN()
                                                       : parse_double(f[8], "max_err");
        if (!f[9].empty())
            row.observed_rate = parse_double(f[9], "observed_rate");
        row.expected_rate = parse_double(f[10], "expected_rate");
        row.log_factor = f[11] == "1";
        row.status = f[12];

        const bool same = !studies.empty() && [&] {
            const auto& p = studies.back().config;
            return p.problem == c.problem && p.effective_solution() == c.effective_solution() &&
                   p.alpha == c.alpha && p.effective_beta() == c.effective_beta() &&
                   p.sigma == c.sigma && p.r == c.r;
        }();
        if (!same) {
            StudyResult s;
            s.config = c;
            s.config.n_list.clear();
            s.config.steps.equal_n = true;
            studies.push_back(std::move(s));
        }
        auto& s = studies.back();
        s.config.n_list.push_back(row.n);
        if (row.m != 0 && row.m != row.n) {
            s.config.steps.equal_n = false;
            s.config.steps.fixed = row.m;
        }
        s.rows.push_back(std::move(row));
    }
    return studies;
}

void write_markdown(std::ostream& out, const std::vector<StudyResult>& studies) {
    std::vector<double> alphas;
    std::vector<double> rs;
    std::vector<std::size_t> ns;
    for (const auto& s : studies) {
        if (std::find(alphas.begin(), alphas.end(), s.config.alpha) == alphas.end())
            alphas.push_back(s.config.alpha);
        if (std::find(rs.begin(), rs.end(), s.config.r) == rs.end())
            rs.push_back(s.config.r);
        for (const auto& row : s.rows)
            if (std::find(ns.begin(), ns.end(), row.n) == ns.end())
                ns.push_back(row.n);
    }
    std::sort(ns.begin(), ns.end());

    auto find = [&](double alpha, double r) -> const StudyResult* {
        for (const auto& s : studies)
            if (s.config.alpha == alpha && s.config.r == r)
                return &s;
        return nullptr;
    };

    if (!studies.empty()) {
        const auto& c = studies.front().config;
        out << "Maximum errors and convergence rates (" << to_string(c.problem) << ", "
            << to_string(c.effective_solution()) << " solution";
        if (c.effective_solution() == SolutionKind::singular)
            out << ", sigma=" << format_param(c.sigma);
        out << ")\n\n";
    }
    out << "| r |";
    for (double a : alphas)
        for (std::size_t n : ns)
            out << " alpha=" << format_param(a) << " N=" << n << " |";
    out << "\n|---|";
    for (std::size_t k = 0; k < alphas.size() * ns.size(); ++k)
        out << "---:|";
    out << '\n';

    for (double r : rs) {
        out << "| " << format_param(r) << " |";
        for (double a : alphas) {
            const StudyResult* s = find(a, r);
            for (std::size_t n : ns) {
                std::string cell;
                if (s) {
                    for (const auto& row : s->rows)
                        if (row.n == n)
                            cell = row.ok() ? format_err(row.max_err) : "failed";
                }
                out << ' ' << cell << " |";
            }
        }
        out << "\n| |";
        for (double a : alphas) {
            const StudyResult* s = find(a, r);
            for (std::size_t k = 0; k < ns.size(); ++k) {
                std::string cell;
                if (s) {
                    for (const auto& row : s->rows) {
                        if (row.n != ns[k])
                            continue;
                        if (row.observed_rate)
                            cell = format_rate(*row.observed_rate);
                        else if (k == 0)
                            cell = "(expected " + format_rate(row.expected_rate) +
                                   (row.log_factor ? ", log" : "") + ")";
                    }
                }
                out << ' ' << cell << " |";
            }
        }
        out << '\n';
    }
}

void write_table(const std::filesystem::path& path, TableFormat format,
                 const std::vector<StudyResult>& studies) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file " + path.string());
    if (format == TableFormat::csv)
        write_csv(out, studies);
    else
        write_markdown(out, studies);
}

std::vector<SpectrumRow> spectrum_study(double alpha, std::size_t n,
                                        const std::vector<double>& r_list) {
    std::vector<SpectrumRow> rows;
    for (double r : r_list) {
        const auto a = assemble(build_graded_mesh({0.0, 1.0}, n, r), alpha);
        const Matrix h = 0.5 * (a.entries + a.entries.transpose());
        const auto probe = extreme_eigs_symmetric(h);
        rows.push_back({r, probe.lambda_max, probe.lambda_min,
                        std::max(probe.residual_max, probe.residual_min)});
    }
    return rows;
}

void write_spectrum(std::ostream& out, TableFormat format, double alpha, std::size_t n,
                    const std::vector<SpectrumRow>& rows) {
    if (format == TableFormat::csv) {
        out << "alpha,N,r,lambda_max_H,lambda_min_H,lambda_max_sum,lambda_min_sum,residual\n";
        for (const auto& row : rows)
            out << format_g17(alpha) << ',' << n << ',' << format_g17(row.r) << ','
                << format_g17(row.lambda_max) << ',' << format_g17(row.lambda_min) << ','
                << format_g17(row.sum_lambda_max()) << ',' << format_g17(row.sum_lambda_min())
                << ',' << format_g17(row.residual) << '\n';
        return;
    }
    out << "Extreme eigenvalues, alpha=" << format_param(alpha) << ", N=" << n
        << " (H = (A+A^T)/2, S = A+A^T)\n\n| |";
    for (const auto& row : rows)
        out << " r=" << format_param(row.r) << " |";
    out << "\n|---|";
    for (std::size_t k = 0; k < rows.size(); ++k)
        out << "---:|";
    char buf[32];
    auto line = [&](const char* label, auto value) {
        out << "\n| " << label << " |";
        for (const auto& row : rows) {
            std::snprintf(buf, sizeof buf, "%.4f", value(row));
            out << ' ' << buf << " |";
        }
    };
    line("max lambda(S)", [](const SpectrumRow& r) { return r.sum_lambda_max(); });
    line("min lambda(S)", [](const SpectrumRow& r) { return r.sum_lambda_min(); });
    line("max lambda(H)", [](const SpectrumRow& r) { return r.lambda_max; });
    line("min lambda(H)", [](const SpectrumRow& r) { return r.lambda_min; });
    out << '\n';
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        entries[key] = trim(std::string_view(line).substr(eq + 1));
    }
    return entries;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    return parse_config_text(in);
}

void apply_config(const std::map<std::string, std::string>& entries, StudyConfig& config) {
    std::optional<std::string> grading;
    for (const auto& [key, value] : entries) {
        if (key == "problem")
            config.problem = parse_problem(value);
        else if (key == "solution")
            config.solution = parse_solution(value);
        else if (key == "alpha")
            config.alpha = parse_double(value, "alpha");
        else if (key == "beta")
            config.beta = parse_double(value, "beta");
        else if (key == "sigma")
            config.sigma = parse_double(value, "sigma");
        else if (key == "r")
            grading = value;
        else if (key == "N") {
            config.n_list.clear();
            for (const auto& part : split(value, ','))
                config.n_list.push_back(parse_size(part, "N"));
        } else if (key == "M") {
            if (trim(value) == "equal_N" || trim(value) == "N") {
                config.steps = StepRule{};
            } else {
                config.steps.equal_n = false;
                config.steps.fixed = parse_size(value, "M");
            }
        } else if (key == "final_time")
            config.final_time = parse_double(value, "final_time");
        else if (key == "error_norm") {
            if (value == "final")
                config.error_norm = ErrorNorm::final_time;
            else if (value == "all_levels")
                config.error_norm = ErrorNorm::all_levels;
            else
                throw std::invalid_argument("error_norm must be final|all_levels");
        } else if (key == "quad_nodes")
            config.quad_nodes = parse_size(value, "quad_nodes");
        else if (key == "tol")
            config.krylov_tol = parse_double(value, "tol");
        else if (key == "format")
            config.format = parse_format(value);
        else if (key == "out")
            config.output = value;
        else
            throw std::invalid_argument("unknown config key '" + key + "'");
    }
    // r may be "opt", which depends on the other parameters
    if (grading)
        config.r = parse_grading(*grading, config);
}

} // namespace nonlocal
