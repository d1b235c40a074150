#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "levysde/spectral_model.hpp"
#include "oracles.hpp"

using levysde::ARule;
using levysde::ConditionEntry;
using levysde::DriftSpec;
using levysde::ParameterError;
using levysde::PowerLawSpec;
using levysde::SpectralModel;

namespace {

PowerLawSpec heat_spec(double alpha, double gamma, double delta,
                       int mask_period = 1) {
    PowerLawSpec spec;
    spec.lambda_exponent = 2.0;
    spec.alpha = alpha;
    spec.gamma = gamma;
    spec.delta = delta;
    spec.mask_period = mask_period;
    spec.a_rule = ARule::power(1.0, -1.0);
    return spec;
}

}  // namespace

TEST(Condition53, PowerLawExponentTest) {
    auto pass = levysde::check_condition_53(heat_spec(1.5, 0.5, 0.5));
    EXPECT_TRUE(pass.pass);
    EXPECT_DOUBLE_EQ(pass.witness, 1.5 * 0.5 - 2.0);  // -1.25 < -1

    auto fail = levysde::check_condition_53(heat_spec(1.5, 1.0, 0.5));
    EXPECT_FALSE(fail.pass);
    EXPECT_DOUBLE_EQ(fail.witness, -0.5);
}

// Harmonic boundary: exponent exactly -1 diverges. Cross-checked against the
// log-growth of the partial sums: S_{2N} - S_N -> log 2 for sum 1/k.
TEST(Condition53, HarmonicBoundaryFails) {
    auto entry = levysde::check_condition_53(heat_spec(1.0, 1.0, 0.5));
    EXPECT_DOUBLE_EQ(entry.witness, -1.0);
    EXPECT_FALSE(entry.pass);

    auto partial = [](int n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k)
            s += std::pow(static_cast<double>(k), 1.0) /
                 std::pow(static_cast<double>(k), 2.0);
        return s;
    };
    EXPECT_NEAR(partial(200000) - partial(100000), std::log(2.0), 1e-4);
}

TEST(Condition53, ExplicitListIsTruncationTrivial) {
    SpectralModel m = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 4);
    auto entry = levysde::check_condition_53(m);
    EXPECT_TRUE(entry.pass);
    double expected = 0.0;
    for (int k = 1; k <= 4; ++k)
        expected += std::pow(std::pow(k, 0.3), 1.5) / (k * k);
    EXPECT_NEAR(entry.witness, expected, 1e-12);
    EXPECT_NE(entry.note.find("truncation-trivial"), std::string::npos);
}

TEST(Gamma315, StrictInequality) {
    EXPECT_TRUE(levysde::check_gamma_315(heat_spec(1.5, 0.5, 0.5)).pass);
    EXPECT_FALSE(levysde::check_gamma_315(heat_spec(1.5, 1.0 / 1.5, 0.5)).pass);
    EXPECT_TRUE(levysde::check_gamma_315(heat_spec(0.5, 1.9, 0.5)).pass);
}

TEST(Delta312, Boundary) {
    EXPECT_TRUE(levysde::check_delta_312(heat_spec(1.5, 0.3, 0.5)).pass);
    EXPECT_FALSE(levysde::check_delta_312(heat_spec(1.5, 0.3, 1.0)).pass);
    EXPECT_TRUE(levysde::check_delta_312(heat_spec(1.5, 0.3, -3.0)).pass);
    EXPECT_DOUBLE_EQ(levysde::check_delta_312(heat_spec(1.5, 0.3, 0.5)).witness,
                     0.5 - 2.0);
}

TEST(A316, PowerRuleAndLists) {
    // a_k = 1 for all k: partial-sum witness tends to pi^2/6.
    auto ones = levysde::check_a_316(ARule::power(1.0, 0.0));
    EXPECT_TRUE(ones.pass);
    EXPECT_NEAR(ones.witness, std::numbers::pi * std::numbers::pi / 6.0, 2e-4);

    auto linear = levysde::check_a_316(ARule::power(1.0, 1.0));
    EXPECT_FALSE(linear.pass);

    auto list = levysde::check_a_316(ARule::list({3.0, -2.0, 0.5}));
    EXPECT_TRUE(list.pass);
    EXPECT_NEAR(list.witness, 9.0 / 1.0 + 4.0 / 4.0 + 0.25 / 9.0, 1e-12);

    EXPECT_TRUE(levysde::check_a_316(ARule::zero()).pass);
}

// Existence of theta in (0,1) with gamma >= lambda_exponent (1/alpha - theta),
// cross-checked by scanning a theta grid.
TEST(Hpz4, ThetaWindow) {
    auto exists_theta = [](double alpha, double gamma, double lam_exp) {
        for (double theta = 1e-4; theta < 1.0; theta += 1e-4)
            if (gamma >= lam_exp * (1.0 / alpha - theta)) return true;
        return false;
    };

    auto e1 = levysde::check_hpz4(heat_spec(1.5, 0.0, 0.5));
    EXPECT_TRUE(e1.pass);
    EXPECT_NEAR(e1.witness, 1.0 / 1.5, 1e-12);
    EXPECT_TRUE(exists_theta(1.5, 0.0, 2.0));

    auto e2 = levysde::check_hpz4(heat_spec(1.5, -1.0, 0.5));
    EXPECT_FALSE(e2.pass);
    EXPECT_NEAR(e2.witness, 1.0 / 1.5 + 0.5, 1e-12);
    EXPECT_FALSE(exists_theta(1.5, -1.0, 2.0));

    auto masked = levysde::check_hpz4(heat_spec(1.5, 0.0, 0.5, 2));
    EXPECT_FALSE(masked.pass);
    EXPECT_NE(masked.note.find("degenerate"), std::string::npos);
}

// Witness of the diagonal strong-Feller supremum against brute-force grid
// maximization of k^{(2-delta)/2} e^{-k^2 t}.
TEST(H3b1, SupremumWitness) {
    auto grid_max = [](double delta, double t) {
        double best = 0.0;
        for (int k = 1; k <= 1000; ++k)
            best = std::max(best, std::pow(static_cast<double>(k),
                                           (2.0 - delta) / 2.0) *
                                      std::exp(-t * k * k));
        return best;
    };

    auto e1 = levysde::check_strong_feller_h3b1(heat_spec(1.5, 0.3, 0.5), 0.1);
    EXPECT_TRUE(e1.pass);
    EXPECT_NEAR(e1.witness, grid_max(0.5, 0.1), 1e-9);
    EXPECT_NEAR(e1.witness, 1.1273, 1e-3);  // attained at k = 2

    auto e2 = levysde::check_strong_feller_h3b1(heat_spec(1.5, 0.3, 2.0), 1.0);
    EXPECT_TRUE(e2.pass);
    EXPECT_NEAR(e2.witness, std::exp(-1.0), 1e-12);  // decreasing, k = 1

    EXPECT_THROW(
        levysde::check_strong_feller_h3b1(heat_spec(1.5, 0.3, 0.5), 0.0),
        ParameterError);
    EXPECT_THROW(
        levysde::check_strong_feller_h3b1(heat_spec(1.5, 0.3, 0.5), -1.0),
        ParameterError);
}

TEST(H3b1, DegenerateGaussianFails) {
    SpectralModel m = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 3);
    m.gauss_coeffs[1] = 0.0;
    auto entry = levysde::check_strong_feller_h3b1(m, 1.0);
    EXPECT_FALSE(entry.pass);
    EXPECT_NE(entry.note.find("degenerate"), std::string::npos);
}

// Heat-equation family materialization: direct power evaluation.
TEST(BuildModel, HeatEquationCoefficients) {
    SpectralModel m = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 4);
    const std::vector<double> lambda = {1.0, 4.0, 9.0, 16.0};
    const std::vector<double> b = {1.0, std::pow(2.0, 0.3), std::pow(3.0, 0.3),
                                   std::pow(4.0, 0.3)};
    const std::vector<double> q = {1.0, std::sqrt(2.0), std::sqrt(3.0), 2.0};
    const std::vector<double> a = {1.0, 0.5, 1.0 / 3.0, 0.25};
    for (int k = 0; k < 4; ++k) {
        EXPECT_DOUBLE_EQ(m.eigenvalues[k], lambda[k]);
        EXPECT_DOUBLE_EQ(m.stable_coeffs[k], b[k]);
        EXPECT_DOUBLE_EQ(m.gauss_coeffs[k], q[k]);
        EXPECT_NEAR(m.const_drift[k], a[k], 1e-15);
    }
    EXPECT_NEAR(m.stable_coeffs[1], 1.2311444133449163, 1e-12);
    EXPECT_NEAR(m.stable_coeffs[2], 1.3903891703159093, 1e-12);
    EXPECT_NEAR(m.stable_coeffs[3], 1.515716566510398, 1e-12);
}

TEST(BuildModel, StructuralErrorsOnly) {
    EXPECT_THROW(levysde::build_model(heat_spec(1.5, 0.3, 0.5), 0),
                 ParameterError);

    // Single mode builds fine.
    SpectralModel one = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 1);
    EXPECT_EQ(one.n_modes, 1);

    // A failing condition does not block the build; it is reported.
    SpectralModel bad = levysde::build_model(heat_spec(1.5, 1.0, 0.5), 4);
    const ConditionEntry* c53 = bad.admissibility.find("53");
    ASSERT_NE(c53, nullptr);
    EXPECT_FALSE(c53->pass);
    EXPECT_FALSE(bad.admissibility.overall());
}

TEST(Report, SixConditionsForFullSpec) {
    SpectralModel m = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 4);
    const std::vector<std::string> ids = {"53", "315", "312",
                                          "316", "hpz4", "h3b1"};
    EXPECT_EQ(m.admissibility.entries.size(), ids.size());
    for (const auto& id : ids) {
        int count = 0;
        for (const auto& e : m.admissibility.entries)
            if (e.id == id) ++count;
        EXPECT_EQ(count, 1) << "condition " << id;
    }
    EXPECT_TRUE(m.admissibility.overall());
}

// With a Gaussian component the jump nondegeneracy entry is informational:
// it is evaluated and reported, but does not gate the overall verdict.
TEST(Report, Hpz4InformationalWhenGaussPresent) {
    SpectralModel mixed = levysde::build_model(heat_spec(1.5, -1.0, 0.5), 4);
    const ConditionEntry* hpz4 = mixed.admissibility.find("hpz4");
    ASSERT_NE(hpz4, nullptr);
    EXPECT_FALSE(hpz4->pass);
    EXPECT_FALSE(hpz4->applicable);
    EXPECT_TRUE(mixed.admissibility.overall());

    PowerLawSpec pure = heat_spec(1.5, -1.0, 0.5);
    pure.delta.reset();
    auto report = levysde::full_report(pure);
    const ConditionEntry* gate = report.find("hpz4");
    ASSERT_NE(gate, nullptr);
    EXPECT_TRUE(gate->applicable);
    EXPECT_FALSE(report.overall());
}

// For the quadratic spectrum the summability and growth-bound checks decide
// the same inequality.
TEST(Report, Condition53Agrees315OnQuadraticSpectrum) {
    for (double alpha : {0.5, 1.0, 1.5, 1.9})
        for (double gamma : {-1.0, 0.0, 0.3, 1.0 / alpha, 1.0}) {
            auto spec = heat_spec(alpha, gamma, 0.5);
            EXPECT_EQ(levysde::check_condition_53(spec).pass,
                      levysde::check_gamma_315(spec).pass)
                << "alpha=" << alpha << " gamma=" << gamma;
        }
}

// Partial-sum witnesses of nonnegative series grow with the truncation.
TEST(Report, PartialSumWitnessMonotoneInTruncation) {
    double prev = 0.0;
    for (int n : {5, 10, 20, 40}) {
        SpectralModel m = levysde::build_model(heat_spec(1.5, 1.0, 0.5), n);
        const double witness = levysde::check_condition_53(m).witness;
        EXPECT_GT(witness, prev);
        prev = witness;
    }
}

TEST(BuildModel, DeterministicAndPure) {
    SpectralModel a = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 5);
    SpectralModel b = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 5);
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);

    SpectralModel c = levysde::build_model(heat_spec(1.5, 0.31, 0.5), 5);
    EXPECT_NE(a.hash(), c.hash());
}

TEST(SpectralModelValidate, RejectsStructuralViolations) {
    SpectralModel m = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 3);
    m.eigenvalues[0] = 0.0;
    EXPECT_THROW(m.validate(), ParameterError);

    SpectralModel m2 = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 3);
    m2.eigenvalues = {2.0, 1.0, 3.0};
    EXPECT_THROW(m2.validate(), ParameterError);

    SpectralModel m3 = levysde::build_model(heat_spec(1.5, 0.3, 0.5), 3);
    m3.stable_coeffs[2] = -0.5;
    EXPECT_THROW(m3.validate(), ParameterError);
}
