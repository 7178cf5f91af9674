#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "bangoff/optimize.hpp"
#include "oracles.hpp"

using namespace bangoff;

namespace {

OptimizationConfig fast_config(int starts = 40) {
    OptimizationConfig c;
    c.n_starts = starts;
    return c;
}

double direct_cost(ObjectiveKind kind, const BangOffControl& c) {
    const TwoQubitState out = evolve(objective_initial_state(kind), c);
    return kind == ObjectiveKind::StatePrepInfidelity
               ? 1.0 - fidelity(out, state_prep_target())
               : 1.0 - concurrence(out);
}

} // namespace

TEST_CASE("objective value matches the direct cost of the evolved state") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = oracles::random_control(rng, 6);
        for (auto kind : {ObjectiveKind::StatePrepInfidelity, ObjectiveKind::Inconcurrence}) {
            const auto [cost, grad] = objective_and_gradient(kind, c);
            CHECK(cost == doctest::Approx(direct_cost(kind, c)).epsilon(1e-12));
            CHECK(cost >= 0.0);
            CHECK(cost <= 1.0 + 1e-12);
            CHECK(grad.size() == c.segments());
        }
    }
}

TEST_CASE("free evolution from |00> has full inconcurrence cost") {
    for (double t : {0.3, 1.0, 2.5}) {
        BangOffControl c{ControlType("0"), {t}};
        const auto [cost, grad] = objective_and_gradient(ObjectiveKind::Inconcurrence, c);
        CHECK(cost == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("objective gradients match finite differences") {
    std::mt19937_64 rng(67);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto c = oracles::random_control(rng, 9);
        for (auto kind : {ObjectiveKind::StatePrepInfidelity, ObjectiveKind::Inconcurrence}) {
            const auto [cost, grad] = objective_and_gradient(kind, c);
            auto f = [&](const DurationVector& t) {
                return direct_cost(kind, BangOffControl{c.type, t});
            };
            const auto fd = oracles::finite_difference_gradient(f, c.durations);
            for (std::size_t k = 0; k < grad.size(); ++k) {
                CHECK(std::abs(grad[k] - fd[k]) <
                      1e-6 * std::max({1.0, std::abs(grad[k]), std::abs(fd[k])}));
                ++checked;
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("two-segment bang pair optimum sits at the midpoint") {
    const TypeOptimum opt = optimize_type(ControlType("PN"), 0.2,
                                          ObjectiveKind::StatePrepInfidelity, fast_config());
    REQUIRE(opt.durations.size() == 2);
    CHECK(opt.durations[0] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(opt.durations[1] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(opt.converged);
    // the optimum is reproduced by direct evolution
    CHECK(direct_cost(ObjectiveKind::StatePrepInfidelity,
                      BangOffControl{ControlType("PN"), {0.1, 0.1}}) ==
          doctest::Approx(opt.cost).epsilon(1e-9));
}

TEST_CASE("the singular segment drops out at short durations") {
    const TypeOptimum opt = optimize_type(ControlType("P0N"), 0.3,
                                          ObjectiveKind::StatePrepInfidelity, fast_config());
    REQUIRE(opt.durations.size() == 3);
    CHECK(opt.durations[0] == doctest::Approx(0.15).epsilon(1e-5));
    CHECK(opt.durations[1] == 0.0); // clamped exactly
    CHECK(opt.durations[2] == doctest::Approx(0.15).epsilon(1e-5));
}

TEST_CASE("interior singular arc at T = 0.8") {
    const TypeOptimum opt = optimize_type(ControlType("P0N"), 0.8,
                                          ObjectiveKind::StatePrepInfidelity, fast_config());
    CHECK(std::abs(opt.durations[0] - 0.1648) < 1e-3);
    CHECK(std::abs(opt.durations[0] - opt.durations[2]) < 1e-6);
    CHECK(opt.durations[1] == doctest::Approx(0.8 - 2 * opt.durations[0]).epsilon(1e-9));
}

TEST_CASE("single-segment types optimize to the trivial duration vector") {
    const TypeOptimum opt = optimize_type(ControlType("P"), 0.7,
                                          ObjectiveKind::Inconcurrence, fast_config(3));
    REQUIRE(opt.durations.size() == 1);
    CHECK(opt.durations[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(opt.converged);
    CHECK(opt.cost == doctest::Approx(direct_cost(ObjectiveKind::Inconcurrence,
                                                  BangOffControl{ControlType("P"), {0.7}}))
                          .epsilon(1e-12));
}

TEST_CASE("squared-variable map lands exactly on the simplex") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        // random seed durations round-trip through the optimizer's start logic:
        // optimize with zero random starts is not allowed, so check the
        // invariant through returned optima instead
        const auto c = oracles::random_control(rng, 7, 0.2, 2.0);
        OptimizationConfig cfg = fast_config(1);
        cfg.max_iterations = 5;
        const TypeOptimum opt =
            optimize_type(c.type, c.total_duration(), ObjectiveKind::Inconcurrence, cfg,
                          {c.durations});
        double sum = 0.0;
        for (double d : opt.durations) {
            CHECK(d >= 0.0);
            sum += d;
        }
        CHECK(std::abs(sum - c.total_duration()) < 1e-12 * std::max(1.0, c.total_duration()));
        (void)dist;
    }
}

TEST_CASE("optimizer dominates an exhaustive simplex grid") {
    for (double T : {0.2, 0.3, 0.5}) {
        auto f = [&](const DurationVector& t) {
            return direct_cost(ObjectiveKind::StatePrepInfidelity,
                               BangOffControl{ControlType("P0N"), t});
        };
        const double grid_best = oracles::grid_min_cost(f, T, 60);
        const TypeOptimum opt = optimize_type(ControlType("P0N"), T,
                                              ObjectiveKind::StatePrepInfidelity,
                                              fast_config());
        CHECK(opt.cost <= grid_best + 1e-6);
    }
}

TEST_CASE("switch-count optimization finds the bang pair at short durations") {
    const SwitchCountResult r = optimize_switch_count(
        1, 0.2, ObjectiveKind::StatePrepInfidelity, fast_config(), 2);
    CHECK(r.best().type.str() == "PN");
    CHECK(r.per_type.size() == 6);
    // the best over all 6 types is achieved by the reported optimum
    for (const TypeOptimum& t : r.per_type) CHECK(r.best().cost <= t.cost);
}

TEST_CASE("mirrored symmetry partners carry identical costs") {
    const SwitchCountResult prep = optimize_switch_count(
        2, 0.6, ObjectiveKind::StatePrepInfidelity, fast_config(), 2);
    for (std::size_t i = 0; i < prep.per_type.size(); ++i) {
        const ControlType partner = flip_type(prep.per_type[i].type);
        if (partner == prep.per_type[i].type) continue;
        for (const TypeOptimum& t : prep.per_type)
            if (t.type == partner) {
                CHECK(t.cost == prep.per_type[i].cost); // bitwise by mirroring
                DurationVector rev(t.durations.rbegin(), t.durations.rend());
                CHECK(rev == prep.per_type[i].durations);
            }
    }

    const SwitchCountResult conc = optimize_switch_count(
        1, 0.9, ObjectiveKind::Inconcurrence, fast_config(), 2);
    for (std::size_t i = 0; i < conc.per_type.size(); ++i) {
        const ControlType partner = negate_type(conc.per_type[i].type);
        if (partner == conc.per_type[i].type) continue;
        for (const TypeOptimum& t : conc.per_type)
            if (t.type == partner) {
                CHECK(t.cost == conc.per_type[i].cost);
                CHECK(t.durations == conc.per_type[i].durations);
            }
    }
}

TEST_CASE("symmetry of the cost under flip and negation holds at optima") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = oracles::random_control(rng, 4);
        const double f1 = direct_cost(ObjectiveKind::StatePrepInfidelity, c);
        const double f2 = direct_cost(ObjectiveKind::StatePrepInfidelity, flip(c));
        CHECK(std::abs(f1 - f2) < 1e-12);
        const double c1 = direct_cost(ObjectiveKind::Inconcurrence, c);
        const double c2 = direct_cost(ObjectiveKind::Inconcurrence, negate(c));
        CHECK(std::abs(c1 - c2) < 1e-12);
    }
}

TEST_CASE("identical seeds give bit-identical optima") {
    OptimizationConfig cfg = fast_config(25);
    cfg.rng_seed = 12345;
    const SwitchCountResult a = optimize_switch_count(
        2, 0.45, ObjectiveKind::StatePrepInfidelity, cfg, 2);
    const SwitchCountResult b = optimize_switch_count(
        2, 0.45, ObjectiveKind::StatePrepInfidelity, cfg, 1);
    REQUIRE(a.per_type.size() == b.per_type.size());
    for (std::size_t i = 0; i < a.per_type.size(); ++i) {
        CHECK(a.per_type[i].cost == b.per_type[i].cost);
        CHECK(a.per_type[i].durations == b.per_type[i].durations);
    }
    CHECK(a.best_index == b.best_index);
}

TEST_CASE("zero-padded embeddings evaluate exactly like the original") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = oracles::random_control(rng, 4);
        const double base = direct_cost(ObjectiveKind::StatePrepInfidelity, c);
        const auto embeddings = zero_padded_embeddings(c);
        CHECK(!embeddings.empty());
        for (const auto& e : embeddings) {
            CHECK(e.type.switch_count() == c.type.switch_count() + 1);
            CHECK(!validation_error(e, c.total_duration()));
            CHECK(direct_cost(ObjectiveKind::StatePrepInfidelity, e) == base);
        }
    }
}

TEST_CASE("best cost is nonincreasing in the switch count") {
    for (auto kind : {ObjectiveKind::StatePrepInfidelity, ObjectiveKind::Inconcurrence}) {
        const auto range = best_over_ns_range(3, 0.7, kind, fast_config(20), 2);
        REQUIRE(range.size() == 4);
        for (std::size_t i = 0; i + 1 < range.size(); ++i)
            CHECK(range[i + 1].best().cost <= range[i].best().cost + 1e-12);
    }
}

TEST_CASE("tied symmetric ansatz expands to the right duration pattern") {
    const TiedType sym = symmetric_ansatz();
    CHECK(sym.type.str() == "P0P0N0N");
    const TypeOptimum opt =
        optimize_tied(sym, 2.0, ObjectiveKind::StatePrepInfidelity, fast_config(20));
    REQUIRE(opt.durations.size() == 7);
    CHECK(opt.durations[0] == opt.durations[6]);
    CHECK(opt.durations[1] == opt.durations[5]);
    CHECK(opt.durations[2] == opt.durations[4]);
    double sum = 0.0;
    for (double d : opt.durations) sum += d;
    CHECK(std::abs(sum - 2.0) < 1e-11);
}

TEST_CASE("invalid optimizer inputs are rejected") {
    CHECK_THROWS(optimize_type(ControlType("PN"), -1.0,
                               ObjectiveKind::StatePrepInfidelity, fast_config()));
    CHECK_THROWS(optimize_type(ControlType("PN"), 0.0,
                               ObjectiveKind::StatePrepInfidelity, fast_config()));
    OptimizationConfig bad;
    bad.n_starts = 0;
    CHECK_THROWS(optimize_type(ControlType("PN"), 0.2,
                               ObjectiveKind::StatePrepInfidelity, bad));
}
