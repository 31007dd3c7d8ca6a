#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nonlocal/assembly.hpp"
#include "nonlocal/harness.hpp"

using namespace nonlocal;

TEST_CASE("observed rates") {
    CHECK(observed_rate(0.04, 0.01) == doctest::Approx(2.0));
    CHECK(observed_rate(0.01, 0.04) == doctest::Approx(-2.0));
    CHECK(observed_rate(2.3460e-2, 1.1669e-2) == doctest::Approx(1.0075).epsilon(1e-4));
    CHECK_THROWS_AS(observed_rate(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(observed_rate(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("expected rates for the smooth steady problem") {
    CHECK(expected_rate_steady_smooth(1.0).rate == doctest::Approx(1.0));
    CHECK_FALSE(expected_rate_steady_smooth(1.0).log_factor);
    const auto crit = expected_rate_steady_smooth(2.0 / 3.0);
    CHECK(crit.rate == doctest::Approx(4.0 / 3.0));
    CHECK(crit.log_factor);
    CHECK(expected_rate_steady_smooth(4.0).rate == doctest::Approx(-2.0));
    CHECK(expected_rate_steady_smooth(0.1).rate == doctest::Approx(0.2));
    CHECK_THROWS_AS(expected_rate_steady_smooth(0.0), std::invalid_argument);
}

TEST_CASE("expected rates for the singular steady problem") {
    CHECK(expected_rate_steady_singular(1.0, 0.3).rate == doctest::Approx(0.3));
    const auto crit = expected_rate_steady_singular(2.0 / 1.3, 0.3);
    CHECK(crit.rate == doctest::Approx(0.4615).epsilon(1e-4));
    CHECK(crit.log_factor);
    CHECK(expected_rate_steady_singular(4.0, 0.3).rate == doctest::Approx(-2.0));
    CHECK_THROWS_AS(expected_rate_steady_singular(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(expected_rate_steady_singular(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("expected rates for evolution problems") {
    CHECK(expected_rate_evolution(1.0, 0.3, 0.3).rate == doctest::Approx(1.0));
    const auto crit = expected_rate_evolution(2.0 / (1.3 - 0.7), 0.3, 0.7);
    CHECK(crit.rate == doctest::Approx(2.0));
    CHECK(crit.log_factor);
    CHECK(expected_rate_evolution(4.0, 0.3, 0.3).rate == doctest::Approx(2.0));
    CHECK_FALSE(expected_rate_evolution(4.0, 0.3, 0.3).log_factor);
    CHECK_THROWS_AS(expected_rate_evolution(1.0, 0.3, 1.0), std::invalid_argument);
}

TEST_CASE("grading parsing") {
    StudyConfig c;
    c.problem = Problem::steady_singular;
    c.sigma = 0.3;
    CHECK(parse_grading("2/3", c) == doctest::Approx(2.0 / 3.0));
    CHECK(parse_grading(" 1.5 ", c) == 1.5);
    CHECK(parse_grading("opt", c) == doctest::Approx(2.0 / 1.3));
    c.problem = Problem::evolve_1d;
    c.alpha = 0.7;
    CHECK(parse_grading("opt", c) == doctest::Approx(2.0 / 0.6));
    c.problem = Problem::steady_smooth;
    CHECK(parse_grading("opt", c) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(parse_grading("abc", c), std::invalid_argument);
    CHECK_THROWS_AS(parse_grading("1/0", c), std::invalid_argument);
    CHECK_THROWS_AS(parse_grading("-1", c), std::invalid_argument);
}

TEST_CASE("study configuration validation") {
    StudyConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_list = {50, 25};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.n_list = {};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = StudyConfig{};
    c.alpha = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = StudyConfig{};
    c.r = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = StudyConfig{};
    c.beta = 1.2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(StudyConfig{}.effective_beta() == StudyConfig{}.alpha);
}

TEST_CASE("smooth steady study at the critical grading") {
    StudyConfig c;
    c.problem = Problem::steady_smooth;
    c.alpha = 0.7;
    c.r = 2.0 / 3.0;
    const auto s = run_study(c);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.all_ok());
    CHECK(s.rows[0].max_err == doctest::Approx(1.6104e-2).epsilon(0.02));
    CHECK(s.rows[1].max_err == doctest::Approx(6.6190e-3).epsilon(0.02));
    CHECK(s.rows[2].max_err == doctest::Approx(2.7124e-3).epsilon(0.02));
    CHECK_FALSE(s.rows[0].observed_rate.has_value());
    CHECK(*s.rows[1].observed_rate == doctest::Approx(1.2827).epsilon(0.04));
    CHECK(s.rows[2].log_factor);
}

TEST_CASE("singular steady study rate") {
    StudyConfig c;
    c.problem = Problem::steady_singular;
    c.alpha = 0.3;
    c.sigma = 0.3;
    c.r = 1.0;
    c.n_list = {25, 50};
    const auto s = run_study(c);
    REQUIRE(s.rows.size() == 2);
    CHECK(std::abs(*s.rows[1].observed_rate - 0.3072) <= 0.05);
    CHECK(s.rows[1].expected_rate == doctest::Approx(0.3));
}

TEST_CASE("single-row and non-halving studies omit observed rates") {
    StudyConfig c;
    c.n_list = {10};
    const auto one = run_study(c);
    REQUIRE(one.rows.size() == 1);
    CHECK_FALSE(one.rows[0].observed_rate.has_value());
    c.n_list = {10, 15, 30};
    const auto s = run_study(c);
    CHECK_FALSE(s.rows[1].observed_rate.has_value());
    CHECK(s.rows[2].observed_rate.has_value());
}

TEST_CASE("divergent gradings report growing errors") {
    for (auto problem : {Problem::steady_smooth, Problem::steady_singular}) {
        StudyConfig c;
        c.problem = problem;
        c.r = 4.0;
        const auto s = run_study(c);
        for (std::size_t k = 1; k < s.rows.size(); ++k) {
            CHECK(s.rows[k].max_err > s.rows[k - 1].max_err);
            CHECK(*s.rows[k].observed_rate < 0.0);
        }
    }
}

TEST_CASE("observed rates track the theory at N >= 50") {
    struct Case {
        Problem problem;
        double alpha;
        double r;
    };
    const std::vector<Case> cases{
        {Problem::steady_smooth, 0.3, 0.1},   {Problem::steady_smooth, 0.7, 2.0 / 3.0},
        {Problem::steady_smooth, 0.3, 1.0},   {Problem::steady_smooth, 0.7, 1.5},
        {Problem::steady_singular, 0.3, 1.0}, {Problem::steady_singular, 0.7, 2.0 / 1.3},
        {Problem::evolve_1d, 0.3, 1.0},       {Problem::evolve_1d, 0.3, 2.0},
        {Problem::evolve_1d, 0.7, 4.0},
    };
    for (const auto& cs : cases) {
        StudyConfig c;
        c.problem = cs.problem;
        c.alpha = cs.alpha;
        c.r = cs.r;
        const auto s = run_study(c);
        for (const auto& row : s.rows) {
            if (row.n < 50 || !row.observed_rate || row.expected_rate <= 0.0)
                continue;
            CAPTURE(to_string(cs.problem));
            CAPTURE(cs.r);
            CHECK(std::abs(*row.observed_rate - row.expected_rate) <= (row.log_factor ? 0.15 : 0.12));
        }
    }
}

TEST_CASE("failed rows keep their reason and the study continues") {
    StudyConfig c;
    c.problem = Problem::evolve_2d;
    c.n_list = {2, 4};
    c.krylov_tol = 1e-300;
    const auto s = run_study(c);
    REQUIRE(s.rows.size() == 2);
    CHECK_FALSE(s.all_ok());
    CHECK(s.rows[0].status.find("krylov") != std::string::npos);
    CHECK_FALSE(s.rows[1].observed_rate.has_value());
}

TEST_CASE("CSV round-trips exactly") {
    std::vector<StudyResult> studies;
    for (double r : {1.0, 2.0 / 3.0}) {
        StudyConfig c;
        c.problem = Problem::evolve_1d;
        c.r = r;
        c.n_list = {8, 16};
        studies.push_back(run_study(c));
    }
    StudyConfig fixed_m;
    fixed_m.problem = Problem::evolve_1d;
    fixed_m.n_list = {4, 8};
    fixed_m.steps = {false, 6};
    studies.push_back(run_study(fixed_m));

    std::stringstream buf;
    write_csv(buf, studies);
    const auto back = read_csv(buf);
    REQUIRE(back.size() == studies.size());
    for (std::size_t k = 0; k < studies.size(); ++k) {
        CHECK(back[k].rows == studies[k].rows);
        CHECK(back[k].config.r == studies[k].config.r);
        CHECK(back[k].config.alpha == studies[k].config.alpha);
        CHECK(back[k].config.n_list == studies[k].config.n_list);
        CHECK(back[k].config.steps.steps_for(8) == studies[k].config.steps.steps_for(8));
    }
    std::istringstream bad("nope\n");
    CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
}

TEST_CASE("markdown table layout") {
    std::vector<StudyResult> studies;
    for (double alpha : {0.3, 0.7}) {
        StudyConfig c;
        c.alpha = alpha;
        c.n_list = {8, 16};
        studies.push_back(run_study(c));
    }
    std::ostringstream out;
    write_markdown(out, studies);
    const std::string md = out.str();
    CHECK(md.find("alpha=0.3 N=8") != std::string::npos);
    CHECK(md.find("alpha=0.7 N=16") != std::string::npos);
    CHECK(md.find("E-0") != std::string::npos);
}

TEST_CASE("spectrum study against a dense eigensolver") {
    const auto rows = spectrum_study(0.5, 40, {0.2, 1.0, 4.0});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        const auto a = assemble(build_graded_mesh({0.0, 1.0}, 40, row.r), 0.5);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(0.5 * (a.entries + a.entries.transpose()),
                                                                 Eigen::EigenvaluesOnly);
        CHECK(row.lambda_min == doctest::Approx(ref.eigenvalues()(0)).epsilon(1e-9));
        CHECK(row.lambda_max == doctest::Approx(ref.eigenvalues()(78)).epsilon(1e-9));
        CHECK(row.sum_lambda_max() == 2.0 * row.lambda_max);
        CHECK(row.residual <= 1e-8);
    }
    CHECK(rows[1].lambda_min > 0.0);
    CHECK(rows[0].lambda_min < 0.0);

    std::ostringstream csv;
    write_spectrum(csv, TableFormat::csv, 0.5, 40, rows);
    CHECK(csv.str().rfind("alpha,N,r,", 0) == 0);
    std::ostringstream md;
    write_spectrum(md, TableFormat::markdown, 0.5, 40, rows);
    CHECK(md.str().find("r=0.2") != std::string::npos);
}

TEST_CASE("config text parsing") {
    std::istringstream in("# study\nproblem = steady_singular\nsigma = 0.4 # boundary\nr = opt\n\nN = 8, 16\n"
                          "alpha=0.6\nM = 12\nformat = markdown\n");
    const auto entries = parse_config_text(in);
    StudyConfig c;
    apply_config(entries, c);
    CHECK(c.problem == Problem::steady_singular);
    CHECK(c.sigma == 0.4);
    CHECK(c.alpha == 0.6);
    CHECK(c.r == doctest::Approx(2.0 / 1.4));
    CHECK(c.n_list == std::vector<std::size_t>{8, 16});
    CHECK_FALSE(c.steps.equal_n);
    CHECK(c.steps.fixed == 12);
    CHECK(c.format == TableFormat::markdown);

    std::istringstream unknown("colour = blue\n");
    CHECK_THROWS_AS(apply_config(parse_config_text(unknown), c), std::invalid_argument);
    std::istringstream malformed("alpha 0.3\n");
    CHECK_THROWS_AS(parse_config_text(malformed), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/config.txt"), std::runtime_error);
}

TEST_CASE("enum parsing") {
    CHECK(parse_problem("evolve_2d") == Problem::evolve_2d);
    CHECK(to_string(Problem::spectrum) == "spectrum");
    CHECK(parse_solution("smooth") == SolutionKind::smooth);
    CHECK(parse_format("md") == TableFormat::markdown);
    CHECK_THROWS_AS(parse_problem("heat"), std::invalid_argument);
    CHECK_THROWS_AS(parse_solution("rough"), std::invalid_argument);
    CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}
