#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nonlocal/quadrature.hpp"

namespace nonlocal {

enum class Problem { steady_smooth, steady_singular, evolve_1d, evolve_2d, spectrum };
enum class ErrorNorm { final_time, all_levels };
enum class TableFormat { csv, markdown };

std::string to_string(Problem problem);
Problem parse_problem(std::string_view text);
std::string to_string(SolutionKind kind);
SolutionKind parse_solution(std::string_view text);
TableFormat parse_format(std::string_view text);

/// Time-step rule for evolution studies: M = N, or a fixed M.
struct StepRule {
    bool equal_n = true;
    std::size_t fixed = 0;

    std::size_t steps_for(std::size_t n) const noexcept { return equal_n ? n : fixed; }
};

struct StudyConfig {
    Problem problem = Problem::steady_smooth;
    SolutionKind solution = SolutionKind::singular; // evolution problems only
    double alpha = 0.5;
    std::optional<double> beta; // 2D kernel exponent on y; defaults to alpha
    double sigma = 0.3;
    double r = 1.0;
    std::vector<std::size_t> n_list{25, 50, 100};
    StepRule steps;
    double final_time = 1.0;
    ErrorNorm error_norm = ErrorNorm::final_time;
    std::size_t quad_nodes = kDefaultQuadNodes;
    double krylov_tol = 1e-10;
    std::optional<std::filesystem::path> output;
    TableFormat format = TableFormat::csv;

    double effective_beta() const noexcept { return beta.value_or(alpha); }
    SolutionKind effective_solution() const noexcept;
    void validate() const;
};

struct RateExpectation {
    double rate = 0.0;
    bool log_factor = false;
};

struct ConvergenceRow {
    std::size_t n = 0;
    std::size_t m = 0; // time steps, 0 for steady problems
    double max_err = 0.0;
    std::optional<double> observed_rate;
    double expected_rate = 0.0;
    bool log_factor = false;
    std::string status = "ok";

    bool ok() const noexcept { return status == "ok"; }
    bool operator==(const ConvergenceRow&) const = default;
};

struct StudyResult {
    StudyConfig config;
    std::vector<ConvergenceRow> rows;
    double wall_seconds = 0.0;

    bool all_ok() const noexcept;
};

/// log2(err_coarse / err_fine) for a mesh doubling; negative when the error grows.
double observed_rate(double err_coarse, double err_fine);

/// Smooth steady solution: N^{r-2} for r > 2/3, N^{-2r} below, log at 2/3.
RateExpectation expected_rate_steady_smooth(double r);
/// Boundary-singular steady solution: N^{r-2} for r(1+sigma) > 2, N^{-r sigma} below.
RateExpectation expected_rate_steady_singular(double r, double sigma);
/// Crank-Nicolson with M ~ N: min(r(1 + sigma - alpha), 2).
RateExpectation expected_rate_evolution(double r, double sigma, double alpha);
RateExpectation expected_rate(const StudyConfig& config);

/// Grading exponent that balances the competing error terms for the problem:
/// 2/3, 2/(1+sigma) or 2/(1+sigma-alpha).
double optimal_grading(const StudyConfig& config);
/// Accepts a decimal, a ratio "p/q", or "opt".
double parse_grading(std::string_view text, const StudyConfig& config);

/// Solves the configured problem at one N and measures the max nodal error.
ConvergenceRow measure_row(const StudyConfig& config, std::size_t n);

/// Runs every N in the list, fills observed/expected rates and writes the
/// table to config.output when set. Failed rows keep their reason in
/// `status`; the study carries on.
StudyResult run_study(const StudyConfig& config);

void write_csv(std::ostream& out, const std::vector<StudyResult>& studies);
std::vector<StudyResult> read_csv(std::istream& in);
/// Rows are r values, column blocks are alpha values, one column per N;
/// each r gets an error line and a rate line.
void write_markdown(std::ostream& out, const std::vector<StudyResult>& studies);
void write_table(const std::filesystem::path& path, TableFormat format,
                 const std::vector<StudyResult>& studies);

struct SpectrumRow {
    double r = 0.0;
    double lambda_max = 0.0; // of H = (A + A^T)/2
    double lambda_min = 0.0;
    double residual = 0.0;

    double sum_lambda_max() const noexcept { return 2.0 * lambda_max; } // of A + A^T
    double sum_lambda_min() const noexcept { return 2.0 * lambda_min; }
};

std::vector<SpectrumRow> spectrum_study(double alpha, std::size_t n,
                                        const std::vector<double>& r_list);
void write_spectrum(std::ostream& out, TableFormat format, double alpha, std::size_t n,
                    const std::vector<SpectrumRow>& rows);

/// key = value lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(std::istream& in);
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
/// Applies recognised keys to `config`; unknown keys throw.
void apply_config(const std::map<std::string, std::string>& entries, StudyConfig& config);

} // namespace nonlocal
