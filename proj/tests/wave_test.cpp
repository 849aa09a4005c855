#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavedecay/damping.hpp"
#include "wavedecay/time_weight.hpp"
#include "wavedecay/wave.hpp"

namespace {

using namespace wavedecay;

TEST(SolveVelocityUpdateTest, LinearLawClosedForm) {
  // linear g: w + c r (w/r) = b  =>  w = b / (1 + c), independent of r
  const auto law = make_linear_law();
  EXPECT_DOUBLE_EQ(solve_velocity_update(0.3, 2.0, law, 1.0), 2.0 / 1.3);
  EXPECT_DOUBLE_EQ(solve_velocity_update(0.3, 2.0, law, 5.0), 2.0 / 1.3);
}

TEST(SolveVelocityUpdateTest, CubicLawRoot) {
  // superlinear r0 = 3, c = r = 1: w + w^3 = 1, the real root of x^3 + x - 1
  const auto law = make_superlinear_law(3.0);
  const double w = solve_velocity_update(1.0, 1.0, law, 1.0);
  EXPECT_NEAR(w, 0.6823278038280193, 1e-12);
  EXPECT_GT(w, 0.0);
  EXPECT_LT(w, 1.0);
  // residual below the solver's own stopping tolerance
  EXPECT_LE(std::abs(w + eval_g(law, w) - 1.0), 1e-12);
}

TEST(SolveVelocityUpdateTest, OddSymmetryAndTrivialCases) {
  const auto law = make_superlinear_law(2.0);
  const double wp = solve_velocity_update(0.7, 1.8, law, 2.0);
  const double wn = solve_velocity_update(0.7, -1.8, law, 2.0);
  EXPECT_NEAR(wn, -wp, 1e-14 * std::abs(wp));

  EXPECT_DOUBLE_EQ(solve_velocity_update(0.7, 0.0, law, 2.0), 0.0);   // b = 0
  EXPECT_DOUBLE_EQ(solve_velocity_update(0.0, 1.25, law, 2.0), 1.25); // no damping

  // damping only ever shrinks |w|, monotonically in c
  const double w_small = solve_velocity_update(0.5, 2.0, law, 1.0);
  const double w_big = solve_velocity_update(2.0, 2.0, law, 1.0);
  EXPECT_LT(w_big, w_small);
  EXPECT_LT(w_small, 2.0);
}

TEST(SolveVelocityUpdateTest, ExpOriginUnderflowPassesThrough) {
  // below the law's underflow knee g evaluates to exactly 0, so w = b
  const auto law = make_exp_origin_law();
  EXPECT_DOUBLE_EQ(solve_velocity_update(1.0, 1e-3, law, 1.0), 1e-3);
}

TEST(SolveVelocityUpdateTest, InputGuards) {
  const auto law = make_linear_law();
  EXPECT_THROW(solve_velocity_update(-0.1, 1.0, law, 1.0), std::invalid_argument);
  EXPECT_THROW(solve_velocity_update(0.1, 1.0, law, 0.5), std::invalid_argument);
  EXPECT_THROW(solve_velocity_update(0.1, std::nan(""), law, 1.0), std::domain_error);
}

TEST(RadialDomainTest, MakeDomainCoversTheCausalCone) {
  const auto d = make_domain(2.0, 0.02, 30.0);
  EXPECT_DOUBLE_EQ(d.r(0), 1.0);
  EXPECT_NEAR(d.r(d.index_of_R()), 2.0, 1e-12);
  EXPECT_GE(d.r_max, 2.0 + 30.0 + 2.0 * 0.02 - 1e-9);
  EXPECT_EQ(d.n, static_cast<int>(std::lround((d.r_max - 1.0) / d.dr)));
}

TEST(RadialDomainTest, MakeDomainGuards) {
  EXPECT_THROW(make_domain(1.0, 0.01, 5.0), std::invalid_argument);   // R <= 1
  EXPECT_THROW(make_domain(2.0, 1.5, 5.0), std::invalid_argument);    // dr >= R - 1
  EXPECT_THROW(make_domain(2.0, 0.03, 5.0), std::invalid_argument);   // R-1 not on grid
  EXPECT_THROW(make_domain(2.0, 0.02, 0.0), std::invalid_argument);   // t_end <= 0
}

TEST(DampingProfileTest, ShapesAndMass) {
  const auto ann = make_damping_profile(DampingProfile::Shape::Annulus, 1.5, 2.0);
  EXPECT_DOUBLE_EQ(ann.value(1.2), 2.0);
  EXPECT_DOUBLE_EQ(ann.value(1.5), 0.0);  // support is [1, r_a)
  EXPECT_DOUBLE_EQ(ann.mass(), 4.0 * M_PI * 2.0 * (1.5 * 1.5 * 1.5 - 1.0) / 3.0);

  const auto bump = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 2.0);
  EXPECT_DOUBLE_EQ(bump.value(1.0), 0.0);
  EXPECT_DOUBLE_EQ(bump.value(1.5), 0.0);
  EXPECT_DOUBLE_EQ(bump.value(1.25), 2.0);  // peak value at the midpoint
  EXPECT_GT(bump.mass(), 0.0);
  EXPECT_LT(bump.mass(), ann.mass());  // bump <= plateau pointwise

  EXPECT_THROW(make_damping_profile(DampingProfile::Shape::Annulus, 1.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(make_damping_profile(DampingProfile::Shape::Annulus, 1.5, -1.0),
               std::invalid_argument);
}

TEST(WaveSimulationTest, ConstructorGuards) {
  const auto dom = make_domain(2.0, 0.02, 5.0);
  const auto prof = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 1.0);
  const auto law = make_linear_law();
  const auto wt = make_constant_weight();
  const auto data = make_gaussian_bump(1.5, 0.1);

  // CFL violation
  EXPECT_THROW(WaveSimulation(dom, prof, law, wt, data, 0.03), std::invalid_argument);
  // damping support sticking out of B_R
  const auto wide = make_damping_profile(DampingProfile::Shape::SmoothBump, 2.5, 1.0);
  EXPECT_THROW(WaveSimulation(dom, wide, law, wt, data, 0.01), std::invalid_argument);
  // initial data support touching the boundary r = 1
  const auto low = make_gaussian_bump(1.2, 0.1);  // support [0.8, 1.6]
  EXPECT_THROW(WaveSimulation(dom, prof, law, wt, low, 0.01), std::invalid_argument);
  // custom data of the wrong length
  const auto bad = make_custom_data({0.0, 0.0}, {0.0, 0.0});
  EXPECT_THROW(WaveSimulation(dom, prof, law, wt, bad, 0.01), std::invalid_argument);
}

TEST(WaveSimulationTest, InitialObservedEnergyEqualsTotal) {
  // data supported inside B_R: before any step every node beyond R is zero,
  // so the two trapezoidal sums agree term by term
  const auto dom = make_domain(3.0, 0.01, 2.0);
  const auto prof = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 1.0);
  WaveSimulation sim(dom, prof, make_linear_law(), make_constant_weight(),
                     make_gaussian_bump(2.0, 0.1), 0.005);
  EXPECT_GT(sim.total_energy(), 0.0);
  EXPECT_DOUBLE_EQ(sim.local_energy(), sim.total_energy());
  EXPECT_DOUBLE_EQ(sim.time(), 0.0);
}

TEST(WaveSimulationTest, SchemeEnergyDropMatchesDissipationEachStep) {
  const auto dom = make_domain(2.0, 0.02, 5.0);
  const auto prof = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 2.0);
  WaveSimulation sim(dom, prof, make_linear_law(), make_constant_weight(),
                     make_gaussian_bump(1.5, 0.1), 0.018);
  sim.step();
  const double C0 = sim.scheme_energy();
  const double tol = 1e-8 * (C0 + 1.0);
  double C_prev = C0;
  for (int k = 0; k < 200; ++k) {
    sim.step();
    const double C = sim.scheme_energy();
    const double drop = C_prev - C;
    EXPECT_NEAR(drop, sim.dt() * sim.dissipation_rate(), tol);
    EXPECT_LE(C, C_prev + tol);  // exactly dissipative up to roundoff
    C_prev = C;
  }
  EXPECT_LT(C_prev, C0);  // the damping actually removed energy
}

TEST(WaveSimulationTest, UndampedSchemeEnergyIsConserved) {
  const auto dom = make_domain(2.0, 0.02, 10.0);
  const auto off = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 0.0);
  WaveSimulation sim(dom, off, make_linear_law(), make_constant_weight(),
                     make_gaussian_bump(1.5, 0.1), 0.018);
  sim.step();
  const double C0 = sim.scheme_energy();
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    sim.step();
    worst = std::max(worst, std::abs(sim.scheme_energy() - C0));
  }
  EXPECT_LE(worst, 1e-10 * C0);
}

TEST(WaveSimulationTest, CustomDataReproducesAnalyticKind) {
  // feeding u-node samples of the same bump must give the bit-identical run
  const auto dom = make_domain(2.0, 0.02, 5.0);
  const auto prof = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 1.0);
  const auto law = make_superlinear_law(2.0);
  const auto wt = make_power_weight(-0.5);
  const auto data = make_gaussian_bump(1.5, 0.1);

  std::vector<double> phi0(dom.n + 1), phi1(dom.n + 1, 0.0);
  for (int i = 0; i <= dom.n; ++i) phi0[i] = data.v0(dom.r(i)) / dom.r(i);

  WaveSimulation a(dom, prof, law, wt, data, 0.018);
  WaveSimulation b(dom, prof, law, wt, make_custom_data(phi0, phi1), 0.018);
  for (int k = 0; k < 5; ++k) {
    a.step();
    b.step();
  }
  for (int i = 0; i <= dom.n; ++i)
    EXPECT_DOUBLE_EQ(a.value_at_node(i), b.value_at_node(i)) << "node " << i;

  // custom data must respect the Dirichlet boundary
  auto bad0 = phi0;
  bad0[0] = 1.0;
  EXPECT_THROW(WaveSimulation(dom, prof, law, wt, make_custom_data(bad0, phi1), 0.018),
               std::invalid_argument);
}

TEST(DalembertTest, GaussianDataSatisfiesTheBoundaryCondition) {
  const auto data = make_gaussian_bump(2.0, 0.2);
  for (double t : {0.3, 0.7, 1.9, 3.4})
    EXPECT_NEAR(dalembert_value(data, t, 1.0), 0.0, 1e-15);
  // at t = 0 the formula reduces to the initial profile
  for (double r : {1.5, 2.0, 2.3})
    EXPECT_DOUBLE_EQ(dalembert_value(data, 0.0, r), data.v0(r));
}

TEST(DalembertTest, OutgoingPulseTranslatesRight) {
  const auto data = make_outgoing_pulse(1.5, 0.3);
  // before the pulse reaches the boundary it is a pure right-mover
  EXPECT_DOUBLE_EQ(dalembert_value(data, 1.25, 3.0), data.v0(1.75));
  EXPECT_DOUBLE_EQ(dalembert_value(data, 2.0, 3.4), data.v0(1.4));
  // and the reflected solution still vanishes at r = 1 for all times
  for (double t : {0.2, 0.6, 1.1, 2.5})
    EXPECT_NEAR(dalembert_value(data, t, 1.0), 0.0, 1e-15);
  EXPECT_THROW(dalembert_value(make_custom_data({}, {}), 1.0, 2.0),
               std::invalid_argument);
}

TEST(WaveSimulationTest, UndampedRunConvergesToDalembert) {
  // two-grid refinement toward the reflected d'Alembert solution at t = 1
  const auto data = make_gaussian_bump(2.0, 0.2);
  const auto off = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 0.0);
  auto sup_error = [&](double dr) {
    const auto dom = make_domain(3.0, dr, 1.0);
    const double dt = 0.5 * dr;
    WaveSimulation sim(dom, off, make_linear_law(), make_constant_weight(), data, dt);
    const int M = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < M + 1; ++k) sim.step();
    EXPECT_NEAR(sim.time(), 1.0, 1e-12);
    double worst = 0.0;
    for (int i = 0; i <= dom.n; ++i)
      worst = std::max(worst,
                       std::abs(sim.value_at_node(i) - dalembert_value(data, 1.0, dom.r(i))));
    return worst;
  };
  const double e1 = sup_error(0.04);
  const double e2 = sup_error(0.02);
  EXPECT_LT(e2, e1);
  EXPECT_GE(std::log2(e1 / e2), 1.75);
}

TEST(WaveSimulationTest, RunSeriesSatisfiesTheEnergyIdentity) {
  const auto dom = make_domain(2.0, 0.02, 8.0);
  const auto prof = make_damping_profile(DampingProfile::Shape::SmoothBump, 1.5, 2.0);
  WaveSimulation sim(dom, prof, make_linear_law(), make_constant_weight(),
                     make_gaussian_bump(1.5, 0.1), 0.01);
  const auto ts = sim.run(8.0, 5);

  ASSERT_FALSE(ts.rows.empty());
  EXPECT_TRUE(ts.complete);
  EXPECT_DOUBLE_EQ(ts.rows.front().t, 0.0);
  EXPECT_GE(ts.rows.back().t, 8.0 - 1e-9);
  EXPECT_DOUBLE_EQ(ts.dt, 0.01);
  EXPECT_DOUBLE_EQ(ts.R, 2.0);

  EXPECT_LT(energy_identity_residual(ts), 5e-2);  // coarse grid: O(dt^2) noise
  const double E0 = ts.rows.front().E_total;
  double d_prev = -1.0;
  for (const auto& row : ts.rows) {
    EXPECT_LE(row.E_R, row.E_total * (1.0 + 1e-12));
    EXPECT_GE(row.D_cum, d_prev - 1e-12 * E0);  // dissipation accumulates
    d_prev = row.D_cum;
  }
  EXPECT_LT(ts.rows.back().E_total, E0);  // energy actually decayed

  EXPECT_THROW(sim.run(-1.0, 5), std::invalid_argument);
  EXPECT_THROW(sim.run(1.0, 0), std::invalid_argument);
}

}  // namespace
