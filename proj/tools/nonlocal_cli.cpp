#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nonlocal/harness.hpp"

namespace {

using namespace nonlocal;

struct Options {
    std::string config_path;
    std::string problem;
    std::vector<std::string> alphas;
    std::optional<double> beta;
    std::optional<double> sigma;
    std::vector<std::string> rs;
    std::vector<std::size_t> ns;
    std::string m;
    std::string solution;
    std::string out;
    std::string format;
    std::optional<std::size_t> quad_nodes;
    std::optional<double> tol;
    bool all_levels = false;
    bool strict = false;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (item.find_first_not_of(" \t") != std::string::npos)
            parts.push_back(item.substr(item.find_first_not_of(" \t")));
    return parts;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "key=value file; flags override it");
    cmd->add_option("--alpha", o.alphas, "kernel exponent(s) in (0,1)")->delimiter(',');
    cmd->add_option("--r", o.rs, "grading exponent(s): decimal, p/q or opt")->delimiter(',');
    cmd->add_option("--N", o.ns, "half interval counts, increasing")->delimiter(',');
    cmd->add_option("--out", o.out, "write the table to this path instead of stdout");
    cmd->add_option("--format", o.format, "csv or markdown");
    cmd->add_option("--quad-nodes", o.quad_nodes, "Gauss-Jacobi nodes per piece");
    cmd->add_flag("--strict", o.strict, "exit nonzero if any row fails");
}

void add_convergence(CLI::App* cmd, Options& o, bool evolution, bool two_d) {
    add_common(cmd, o);
    cmd->add_option("--sigma", o.sigma, "boundary exponent of the singular solution");
    if (evolution) {
        cmd->add_option("--M", o.m, "time steps, or N for M = N");
        cmd->add_option("--solution", o.solution, "smooth or singular")
            ->check(CLI::IsMember({"smooth", "singular"}));
        cmd->add_flag("--all-levels", o.all_levels, "max error over all time levels");
    } else {
        cmd->add_option("--solution", o.solution, "smooth or singular")
            ->check(CLI::IsMember({"smooth", "singular"}));
    }
    if (two_d) {
        cmd->add_option("--beta", o.beta, "kernel exponent along y");
        cmd->add_option("--tol", o.tol, "relative GMRES tolerance");
    }
}

// Config file values first, then flags.
StudyConfig base_config(const Options& o, std::vector<std::string>& alphas,
                        std::vector<std::string>& rs) {
    StudyConfig c;
    if (!o.config_path.empty()) {
        auto entries = parse_config_file(o.config_path);
        for (auto* key : {"alpha", "r"}) {
            auto it = entries.find(key);
            if (it == entries.end())
                continue;
            (std::string(key) == "alpha" ? alphas : rs) = split_list(it->second);
            entries.erase(it);
        }
        apply_config(entries, c);
    }
    if (!o.problem.empty())
        c.problem = parse_problem(o.problem);
    if (!o.alphas.empty())
        alphas = o.alphas;
    if (!o.rs.empty())
        rs = o.rs;
    if (o.beta)
        c.beta = o.beta;
    if (o.sigma)
        c.sigma = *o.sigma;
    if (!o.ns.empty())
        c.n_list = o.ns;
    if (!o.m.empty()) {
        if (o.m == "N") {
            c.steps = StepRule{};
        } else {
            c.steps.equal_n = false;
            c.steps.fixed = std::stoul(o.m);
        }
    }
    if (!o.solution.empty())
        c.solution = parse_solution(o.solution);
    if (!o.out.empty())
        c.output = o.out;
    if (!o.format.empty())
        c.format = parse_format(o.format);
    if (o.quad_nodes)
        c.quad_nodes = *o.quad_nodes;
    if (o.tol)
        c.krylov_tol = *o.tol;
    if (o.all_levels)
        c.error_norm = ErrorNorm::all_levels;
    if (alphas.empty())
        alphas.push_back(std::to_string(c.alpha));
    return c;
}

void emit(const StudyConfig& c, const std::function<void(std::ostream&)>& writer) {
    if (c.output) {
        std::ofstream out(*c.output);
        if (!out)
            throw std::runtime_error("cannot open output file " + c.output->string());
        writer(out);
    } else {
        writer(std::cout);
    }
}

int run_convergence(const Options& o, Problem fixed) {
    std::vector<std::string> alphas, rs;
    StudyConfig base = base_config(o, alphas, rs);
    if (fixed != Problem::spectrum)
        base.problem = fixed;
    if (base.problem == Problem::steady_smooth || base.problem == Problem::steady_singular) {
        if (!o.solution.empty())
            base.problem = base.solution == SolutionKind::smooth ? Problem::steady_smooth
                                                                 : Problem::steady_singular;
    }
    if (rs.empty())
        rs.push_back("1");

    std::vector<StudyResult> studies;
    for (const auto& a : alphas) {
        for (const auto& r : rs) {
            StudyConfig c = base;
            c.alpha = std::stod(a);
            c.r = parse_grading(r, c);
            c.output.reset();
            studies.push_back(run_study(c));
            const auto& s = studies.back();
            std::fprintf(stderr, "alpha=%g r=%g: %.2f s\n", c.alpha, c.r, s.wall_seconds);
        }
    }
    emit(base, [&](std::ostream& out) {
        if (base.format == TableFormat::csv)
            write_csv(out, studies);
        else
            write_markdown(out, studies);
    });

    int failures = 0;
    for (const auto& s : studies)
        for (const auto& row : s.rows)
            if (!row.ok()) {
                ++failures;
                std::fprintf(stderr, "row alpha=%g r=%g N=%zu failed: %s\n", s.config.alpha,
                             s.config.r, row.n, row.status.c_str());
            }
    return o.strict && failures > 0 ? 1 : 0;
}

int run_spectrum(const Options& o) {
    std::vector<std::string> alphas, rs;
    StudyConfig base = base_config(o, alphas, rs);
    base.problem = Problem::spectrum;
    if (rs.empty())
        rs = {"0.2", "0.9", "1", "1.1", "4"};
    const std::size_t n = o.ns.empty() ? 500 : o.ns.front();
    std::vector<double> r_values;
    for (const auto& r : rs)
        r_values.push_back(parse_grading(r, base));
    emit(base, [&](std::ostream& out) {
        for (const auto& a : alphas) {
            const double alpha = std::stod(a);
            write_spectrum(out, base.format, alpha, n, spectrum_study(alpha, n, r_values));
        }
    });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal diffusion solvers on graded meshes"};
    app.require_subcommand(1);

    Options steady, evolve, evolve2d, study, spectrum;
    auto* c_steady = app.add_subcommand("steady", "steady problem -Lu = f in 1D");
    add_convergence(c_steady, steady, false, false);
    auto* c_evolve = app.add_subcommand("evolve", "1D evolution with Crank-Nicolson");
    add_convergence(c_evolve, evolve, true, false);
    auto* c_evolve2d = app.add_subcommand("evolve2d", "2D evolution, matrix-free GMRES");
    add_convergence(c_evolve2d, evolve2d, true, true);
    auto* c_study = app.add_subcommand("study", "convergence study for any problem");
    add_convergence(c_study, study, true, true);
    c_study->add_option("--problem", study.problem,
                        "steady_smooth|steady_singular|evolve_1d|evolve_2d|spectrum");
    auto* c_spectrum = app.add_subcommand("spectrum", "extreme eigenvalues of (A+A^T)/2");
    add_common(c_spectrum, spectrum);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_steady->parsed()) {
            steady.solution = steady.solution.empty() ? "smooth" : steady.solution;
            return run_convergence(steady, Problem::steady_smooth);
        }
        if (c_evolve->parsed())
            return run_convergence(evolve, Problem::evolve_1d);
        if (c_evolve2d->parsed()) {
            if (evolve2d.ns.empty())
                evolve2d.ns = {10, 20, 40};
            return run_convergence(evolve2d, Problem::evolve_2d);
        }
        if (c_spectrum->parsed())
            return run_spectrum(spectrum);
        if (c_study->parsed()) {
            std::vector<std::string> a, r;
            const auto problem = base_config(study, a, r).problem;
            if (problem == Problem::spectrum)
                return run_spectrum(study);
            return run_convergence(study, Problem::spectrum);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
