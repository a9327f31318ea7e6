#include "malab/experiments.hpp"
#include "malab/masolver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace malab;
namespace fs = std::filesystem;

namespace {

enum Exit { completed = 0, failed = 1, inconclusive = 2 };

// Writes report.json under out, or prints it when out is empty.
void emit(const std::string& out, const std::string& json)
{
    if (out.empty()) {
        std::cout << json << '\n';
        return;
    }
    fs::create_directories(out);
    std::ofstream(fs::path(out) / "report.json") << json << '\n';
}

template <class F>
void write_csv(const std::string& out, const std::string& name, F&& body)
{
    if (out.empty())
        return;
    std::ofstream f(fs::path(out) / name);
    f.precision(12);
    body(f);
}

void add_solver_options(CLI::App* cmd, SolverOptions& s)
{
    cmd->add_option("--tol", s.tol, "Newton tolerance (update < tol h^2)");
    cmd->add_option("--stencil-width", s.stencil_width, "1: 4 directions, 2: 8, 3: 16")->check(CLI::Range(1, 3));
    cmd->add_flag("--verbose", s.verbose, "print Newton progress on stderr");
}

int run_instability_cmd(ExperimentConfig c, bool sweep, const std::string& out)
{
    std::vector<double> eps_list = sweep ? std::vector<double>{0.0, 0.0125, 0.025, 0.05, 0.1}
                                         : std::vector<double>{c.epsilon};
    nlohmann::json all = nlohmann::json::array();
    bool undecided = false;
    std::vector<InstabilityReport> reports;
    for (double eps : eps_list) {
        c.epsilon = eps;
        reports.push_back(run_instability(c));
        const InstabilityReport& r = reports.back();
        undecided = undecided || r.behavior.verdict == Verdict::inconclusive;
        all.push_back(nlohmann::json::parse(to_json(r)));
    }
    emit(out, sweep ? all.dump(2) : all.front().dump(2));
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const std::string suffix = sweep ? "_eps" + std::to_string(i) : "";
        write_csv(out, "trace" + suffix + ".csv", [&](std::ostream& f) { write_trace_csv(f, reports[i].trace); });
    }
    if (sweep)
        write_csv(out, "sweep.csv", [&](std::ostream& f) {
            f << "epsilon,verdict,slope,slope_1e-3_1e-1,sup_eccentricity,product_check\n";
            for (const InstabilityReport& r : reports)
                f << r.epsilon << ',' << to_string(r.behavior.verdict) << ',' << r.behavior.slope_fit.slope << ','
                  << r.slope_reference.slope << ',' << r.behavior.sup_eccentricity << ','
                  << r.behavior.product_check << '\n';
        });
    return undecided ? inconclusive : completed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"malab: Monge-Ampere equations with power-law right-hand side"};
    app.require_subcommand(1);
    std::string out;

    ExperimentConfig cat;
    cat.name = ExperimentName::catalog;
    cat.alpha_list = {-1.5, -1.0, -0.5, 0.0, 1.0, 2.0, 4.0, 6.0};
    auto* c_cat = app.add_subcommand("catalog", "homogeneous solutions per alpha and symmetry order k");
    c_cat->add_option("--alpha-list", cat.alpha_list, "exponents")->delimiter(',');
    c_cat->add_option("--k-max", cat.k_max, "largest symmetry order");
    c_cat->add_option("--out", out, "output directory");

    ExperimentConfig ins;
    ins.name = ExperimentName::instability;
    bool sweep = false;
    auto* c_ins = app.add_subcommand("instability", "perturbed boundary data u0 - eps cos 2theta, alpha > 0");
    c_ins->add_option("--alpha", ins.alpha);
    c_ins->add_option("--eps", ins.epsilon);
    c_ins->add_option("--grid", ins.grid, "cells across the disc");
    c_ins->add_option("--t-list", ins.t_values, "section heights, decreasing")->delimiter(',');
    c_ins->add_flag("--sweep", sweep, "run eps in {0, 0.0125, 0.025, 0.05, 0.1}");
    c_ins->add_option("--out", out, "output directory");
    add_solver_options(c_ins, ins.solver);

    ExperimentConfig neg;
    neg.name = ExperimentName::negative_alpha;
    neg.alpha = -1.0;
    auto* c_neg = app.add_subcommand("negative", "boundary data u0 (1 + p cos theta), -2 < alpha < 0");
    c_neg->add_option("--alpha", neg.alpha);
    c_neg->add_option("--perturbation", neg.perturbation, "p");
    c_neg->add_option("--grid", neg.grid, "cells across the disc");
    c_neg->add_option("--r-list", neg.r_values, "ring radii, decreasing")->delimiter(',');
    c_neg->add_option("--t-list", neg.t_values, "section heights, decreasing")->delimiter(',');
    c_neg->add_option("--out", out, "output directory");
    add_solver_options(c_neg, neg.solver);

    ExperimentConfig blo;
    blo.name = ExperimentName::blowup;
    blo.r_values = {0.5, 0.25, 0.125};
    auto* c_blo = app.add_subcommand("blowup", "distance of blow-ups of a field to the homogeneous catalog");
    c_blo->add_option("--input", blo.input, "field file")->required()->check(CLI::ExistingFile);
    c_blo->add_option("--alpha", blo.alpha)->required();
    c_blo->add_option("--r-list", blo.r_values, "scales, decreasing")->delimiter(',');
    c_blo->add_option("--k-max", blo.k_max, "largest symmetry order in the catalog");
    c_blo->add_option("--out", out, "output directory");

    ExperimentConfig lin;
    lin.name = ExperimentName::linearized;
    lin.grid = 256;
    auto* c_lin = app.add_subcommand("linearized", "decay exponent of the cos 2theta mode, alpha > 0");
    c_lin->add_option("--alpha", lin.alpha);
    c_lin->add_option("--grid", lin.grid, "polar nodes per direction");
    c_lin->add_option("--out", out, "output directory");

    std::string problem_file;
    SolverOptions sol_opts;
    auto* c_sol = app.add_subcommand("solve", "solve a Dirichlet problem given as a key-value file");
    c_sol->add_option("--problem", problem_file)->required()->check(CLI::ExistingFile);
    c_sol->add_option("--out", out, "output directory");
    add_solver_options(c_sol, sol_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_cat->parsed()) {
            const auto rows = run_catalog(cat);
            emit(out, to_json(rows));
            write_csv(out, "catalog.csv", [&](std::ostream& f) { write_catalog_csv(f, rows); });
            return completed;
        }
        if (c_ins->parsed())
            return run_instability_cmd(ins, sweep, out);
        if (c_neg->parsed()) {
            const NegativeAlphaReport r = run_negative_alpha(neg);
            emit(out, to_json(r));
            write_csv(out, "rings.csv", [&](std::ostream& f) {
                f << "r,ratio_mean,ratio_min,ratio_max\n";
                for (const RingRatio& q : r.rings)
                    f << q.r << ',' << q.mean << ',' << q.min << ',' << q.max << '\n';
            });
            write_csv(out, "trace.csv", [&](std::ostream& f) { write_trace_csv(f, r.trace); });
            return r.behavior.verdict == Verdict::inconclusive ? inconclusive : completed;
        }
        if (c_blo->parsed()) {
            const BlowupReport r = run_blowup(load_field(blo.input), blo);
            emit(out, to_json(r));
            write_csv(out, "distances.csv", [&](std::ostream& f) {
                f << "r,distance,k,phase\n";
                for (const BlowupStep& s : r.steps)
                    f << s.r << ',' << s.distance << ',' << s.k << ',' << s.phase << '\n';
            });
            return completed;
        }
        if (c_lin->parsed()) {
            const LinearizedReport r = run_linearized(lin);
            emit(out, to_json(r));
            write_csv(out, "decay.csv", [&](std::ostream& f) {
                f << "r,amplitude\n";
                for (const auto& [rr, a] : r.decay)
                    f << rr << ',' << a << '\n';
            });
            return completed;
        }
        if (c_sol->parsed()) {
            const DirichletProblem p = load_problem(problem_file);
            const ConvexSolution s = solve(p, sol_opts);
            const nlohmann::json j = {{"residual_sup", s.residual_sup},
                                      {"iterations", s.iterations},
                                      {"convexity_margin", s.convexity_margin},
                                      {"max_update", s.max_update}};
            emit(out, j.dump(2));
            if (!out.empty()) {
                save_field((fs::path(out) / "field.txt").string(), s.field);
                write_csv(out, "field.csv", [&](std::ostream& f) { write_field_csv(f, s.field); });
            }
            return completed;
        }
    } catch (const std::exception& e) {
        std::cerr << "malab: " << e.what() << '\n';
        return failed;
    }
    return failed;
}
