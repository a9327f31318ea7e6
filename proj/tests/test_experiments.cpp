#include "doctest.h"

#include "malab/experiments.hpp"

#include "json.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace malab;
using std::numbers::pi;

TEST_SUITE("experiments") {

TEST_CASE("decay exponent of the cos 2theta mode")
{
    const Regime r = regime_from_alpha(2.0);
    const double rho = rho_exponent(r);
    CHECK(rho == doctest::Approx((-1 + std::sqrt(33.0)) / 2).epsilon(1e-14));
    CHECK(std::abs(rho * (rho - 1) + (r.beta - 1) * (rho - 4)) < 1e-12);
    CHECK(rho_rejected(r) < 0.0);
    for (double a : {0.01, 0.5, 1.0, 2.0, 6.0, 50.0}) {
        const Regime ra = regime_from_alpha(a);
        CHECK(rho_exponent(ra) > 2.0);
        CHECK(rho_exponent(ra) < ra.beta);
        CHECK(rho_rejected(ra) < 0.0);
    }
    CHECK(rho_exponent(regime_from_alpha(1e-8)) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_THROWS_AS(rho_exponent(regime_from_alpha(0.0)), DomainError);
    CHECK_THROWS_AS(rho_exponent(regime_from_alpha(-1.0)), DomainError);
}

TEST_CASE("linearized solve on a small grid")
{
    ExperimentConfig c;
    c.name = ExperimentName::linearized;
    c.alpha = 2.0;
    c.grid = 128;
    const LinearizedReport rep = run_linearized(c);
    CHECK(rep.rho_fitted == doctest::Approx(rep.rho_closed_form).epsilon(0.02));
    CHECK(rep.rho_manufactured == doctest::Approx(rep.rho_closed_form).epsilon(0.01));
    CHECK(rep.manufactured_error < 1e-2);
    CHECK_FALSE(rep.decay.empty());
    CHECK(nlohmann::json::parse(to_json(rep)).contains("rho_fitted"));
}

TEST_CASE("configuration validation")
{
    ExperimentConfig c;
    c.name = ExperimentName::instability;
    c.alpha = -1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.alpha = 2.0;
    c.epsilon = -0.1;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.epsilon = 0.05;
    c.t_values = {0.1, 0.2};
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.t_values = {0.2, 0.1};
    CHECK_NOTHROW(c.validate());
    c.grid = 4;
    CHECK_THROWS_AS(c.validate(), DomainError);

    ExperimentConfig n;
    n.name = ExperimentName::negative_alpha;
    n.alpha = 1.0;
    CHECK_THROWS_AS(n.validate(), DomainError);
    n.alpha = -1.0;
    n.perturbation = 1.5;
    CHECK_THROWS_AS(n.validate(), DomainError);

    ExperimentConfig k;
    k.name = ExperimentName::catalog;
    k.alpha_list = {1.0, -3.0};
    CHECK_THROWS_AS(k.validate(), DomainError);
}

TEST_CASE("catalog rows")
{
    ExperimentConfig c;
    c.name = ExperimentName::catalog;
    c.alpha_list = {-1.0, 0.0, 6.0};
    c.k_max = 4;
    const auto rows = run_catalog(c);

    int neg = 0;
    bool zero_k2 = false, six_k3 = false;
    for (const CatalogRow& row : rows) {
        if (row.alpha == -1.0) {
            ++neg;
            CHECK(row.k == 1);
            CHECK(row.exists);
        }
        if (row.alpha == 0.0 && row.k == 2) {
            zero_k2 = true;
            REQUIRE(row.I_c.has_value());
            CHECK(*row.I_c == doctest::Approx(pi / 2));
            CHECK(row.note.find("pi/2") != std::string::npos);
        }
        if (row.alpha == 6.0 && row.k == 3) {
            six_k3 = true;
            CHECK(row.exists);
            REQUIRE(row.c_star.has_value());
            REQUIRE(row.ode_residual_max.has_value());
            CHECK(*row.ode_residual_max < 1e-6);
            REQUIRE(row.t_minus.has_value());
            CHECK(*row.t_minus < *row.t_plus);
        }
        if (row.alpha == 6.0 && row.k == 2)
            CHECK_FALSE(row.exists);
    }
    CHECK(neg == 1);
    CHECK(zero_k2);
    CHECK(six_k3);

    std::ostringstream csv;
    write_catalog_csv(csv, rows);
    CHECK(csv.str().rfind("alpha,beta,k,exists,c_star,I_c,t_minus,t_plus,ode_residual_max,note\n", 0) == 0);
    CHECK(nlohmann::json::parse(to_json(rows)).size() == rows.size());

    const auto entries = catalog_entries(regime_from_alpha(6.0), 4);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].profile.is_radial());
    CHECK(entries[1].k == 3);
}

TEST_CASE("anchoring")
{
    const auto u = ScalarField::from_function(DiscGrid::cartesian(64, 1.0), [](const Vec2& x) {
        return std::pow(x.x() - 0.25, 2) + 2 * std::pow(x.y() + 0.125, 2) + 1.0;
    });
    const Anchored a = anchor_at_minimum(u);
    CHECK((a.point - Vec2(0.25, -0.125)).norm() < 1e-12);
    CHECK(a.gradient.norm() < 1e-10);
    CHECK(a.value == doctest::Approx(1.0));
    const Anchored o = anchor_at(u);
    CHECK((o.gradient - Vec2(-0.5, 0.5)).norm() < 1e-10);
    REQUIRE(o.field.gradient_origin.has_value());
    CHECK(o.field.gradient_origin->norm() == 0.0);
    CHECK(std::abs(o.field.sample(Vec2(0.5, 0.5)) - (0.25 + 2 * 0.25)) < 1e-10);
}

TEST_CASE("blow-up of homogeneous fields")
{
    const Regime r = regime_from_alpha(2.0);
    ExperimentConfig c;
    c.name = ExperimentName::blowup;
    c.alpha = 2.0;
    c.k_max = 4;
    c.r_values = {0.5, 0.25};
    const BlowupReport rep = run_blowup(radial_solution(r, DiscGrid::cartesian(256, 1.0)), c);
    REQUIRE(rep.steps.size() == 2);
    for (const BlowupStep& s : rep.steps) {
        CHECK(s.k == 1);
        CHECK(s.distance < 1e-6);
    }

    const Regime r6 = regime_from_alpha(6.0);
    const auto entries = catalog_entries(r6, 4);
    const HomogeneousProfile& p = entries[1].profile;
    const ScalarField w = assemble_homogeneous(p, DiscGrid::cartesian(256, 1.0), 0.3);
    c.alpha = 6.0;
    const BlowupReport rw = run_blowup(w, c);
    for (const BlowupStep& s : rw.steps) {
        CHECK(s.k == 3);
        CHECK(s.distance < 1e-5);
        CHECK(std::remainder(s.phase - 0.3, p.period) == doctest::Approx(0.0).epsilon(1e-3));
    }
}

TEST_CASE("instability run reduces to u0 without perturbation")
{
    ExperimentConfig c;
    c.name = ExperimentName::instability;
    c.alpha = 2.0;
    c.epsilon = 0.0;
    c.grid = 64;
    c.t_values = {0.1, 0.05, 0.02};
    const InstabilityReport rep = run_instability(c);
    CHECK(rep.sup_deviation_from_u0 < 1e-2);
    CHECK(rep.anchor.norm() < 1e-12);
    CHECK(rep.slope_expected == doctest::Approx(0.25));
    CHECK(nlohmann::json::parse(to_json(rep)).contains("behavior"));
}

TEST_CASE("negative alpha run on a small grid")
{
    ExperimentConfig c;
    c.name = ExperimentName::negative_alpha;
    c.alpha = -0.5;
    c.perturbation = 0.0;
    c.grid = 64;
    c.t_values = {0.05, 0.02, 0.01};
    const NegativeAlphaReport rep = run_negative_alpha(c);
    REQUIRE_FALSE(rep.rings.empty());
    for (const RingRatio& q : rep.rings)
        CHECK(std::abs(q.mean - 1) < 2e-2);
    CHECK(rep.gradient_at_origin.norm() < 0.05);
    CHECK(nlohmann::json::parse(to_json(rep)).contains("rings"));
}

}
