import math
import re

import numpy as np
import pytest

import ampso.optimizer as optimizer_module
from ampso.benchmarks import make_spec
from ampso.optimizer import (
    CONVERGENCE,
    EXPLOITATION,
    EXPLORATION,
    AmpsoConfig,
    ConfigError,
    PhaseState,
    run_ampso,
    run_gpso,
)


def phase_word(span) -> str:
    return {EXPLORATION: "R", EXPLOITATION: "X", CONVERGENCE: "C"}[span.phase]


def assert_phase_grammar(phase_log):
    word = "".join(phase_word(span) for span in phase_log)
    assert re.fullmatch(r"(RX)+C", word), f"phase sequence {word!r} breaks the grammar"


class TestConfig:
    def test_plan_matches_stated_defaults(self):
        config = AmpsoConfig()
        plan = config.plan(config.resolved_budget(10))
        assert plan.total_iterations == 2500
        assert plan.exploration_iterations == 50
        assert plan.exploitation_cap == 500
        assert plan.replace_count == 10

    def test_budget_defaults_to_dimension_rule(self):
        assert AmpsoConfig().resolved_budget(30) == 300_000
        assert AmpsoConfig(fe_budget=1234).resolved_budget(30) == 1234

    def test_sub_swarm_size_must_divide(self):
        with pytest.raises(ConfigError):
            AmpsoConfig(exploration_size=10, sub_swarm_size=4).validate()

    def test_replace_ratio_limits(self):
        with pytest.raises(ConfigError):
            AmpsoConfig(replace_ratio=0.0).validate()
        with pytest.raises(ConfigError):
            AmpsoConfig(replace_ratio=1.0).validate()

    def test_unknown_override_rejected(self):
        with pytest.raises(ConfigError):
            AmpsoConfig().with_overrides(bogus=1)

    def test_invalid_config_rejected_before_any_evaluation(self):
        spec = make_spec("sphere", 3)
        calls = {"n": 0}
        inner = spec.function

        def spy(block):
            calls["n"] += 1
            return inner(block)

        spec.function = spy
        with pytest.raises(ConfigError):
            run_ampso(AmpsoConfig(sub_swarm_size=3), spec, seed=0)
        assert calls["n"] == 0


@pytest.fixture(scope="module")
def small_run():
    spec = make_spec("rastrigin", 4)
    config = AmpsoConfig(fe_budget=12_000)
    return config, spec, run_ampso(config, spec, seed=11)


@pytest.fixture(scope="module")
def sphere_run():
    spec = make_spec("sphere", 10)
    config = AmpsoConfig()
    return config, spec, run_gpso(config, spec, seed=5)


class TestRunAmpso:
    def test_determinism(self, small_run):
        config, spec, result = small_run
        again = run_ampso(config, spec, seed=11)
        assert again.fe_used == result.fe_used
        assert np.array_equal(again.best_position, result.best_position)
        assert [p.fe for p in again.trace] == [p.fe for p in result.trace]
        assert [p.best_error for p in again.trace] == [p.best_error for p in result.trace]

    def test_budget_law(self, small_run):
        config, spec, result = small_run
        budget = config.resolved_budget(spec.dimension)
        assert budget - config.convergence_size < result.fe_used <= budget

    def test_phase_grammar(self, small_run):
        _, _, result = small_run
        assert_phase_grammar(result.phase_log)

    def test_phase_spans_tile_the_run(self, small_run):
        _, _, result = small_run
        assert result.phase_log[0].start_fe == 0
        for before, after in zip(result.phase_log, result.phase_log[1:]):
            assert before.end_fe == after.start_fe
        assert result.phase_log[-1].end_fe == result.fe_used

    def test_trace_fe_strictly_increasing(self, small_run):
        _, _, result = small_run
        fes = [p.fe for p in result.trace]
        assert all(b > a for a, b in zip(fes, fes[1:]))

    def test_trace_best_error_non_increasing(self, small_run):
        _, _, result = small_run
        errors = [p.best_error for p in result.trace]
        assert all(b <= a for a, b in zip(errors, errors[1:]))

    def test_best_error_matches_position(self, small_run):
        _, spec, result = small_run
        value = float(spec.function(result.best_position[None, :])[0])
        assert value - spec.optimum_value == result.best_error

    def test_exploitation_iterations_cost_swarm_size(self, small_run):
        config, _, result = small_run
        for span in result.phase_log:
            if span.phase != EXPLOITATION:
                continue
            rows = [p for p in result.trace if span.start_fe < p.fe <= span.end_fe]
            # first iteration lands one spawn plus one iteration after the start
            assert rows[0].fe == span.start_fe + 2 * config.exploitation_size
            for a, b in zip(rows, rows[1:]):
                assert b.fe - a.fe == config.exploitation_size

    def test_exploration_iterations_cost_exploration_size(self, small_run):
        config, _, result = small_run
        for span in result.phase_log:
            if span.phase != EXPLORATION:
                continue
            rows = [p for p in result.trace if span.start_fe < p.fe <= span.end_fe]
            for a, b in zip(rows, rows[1:]):
                assert b.fe - a.fe == config.exploration_size

    def test_convergence_starts_after_a_third_of_iterations(self, small_run):
        config, spec, result = small_run
        plan = config.plan(config.resolved_budget(spec.dimension))
        convergence_start = next(s.start_fe for s in result.phase_log if s.phase == CONVERGENCE)
        pre_convergence_iters = sum(
            1 for p in result.trace if p.fe <= convergence_start and not math.isnan(p.omega)
        )
        assert pre_convergence_iters > plan.total_iterations / 3

    def test_diversity_and_omega_ranges(self, small_run):
        _, _, result = small_run
        for point in result.trace:
            if not math.isnan(point.diversity):
                assert 0.0 <= point.diversity <= 1.0
            if not math.isnan(point.omega):
                assert 0.5 <= point.omega <= 0.9

    def test_positions_within_bounds_at_checkpoints(self, monkeypatch):
        spec = make_spec("ackley", 3)
        config = AmpsoConfig(fe_budget=6000)
        checked = {"n": 0}
        real_step = optimizer_module.pso_step

        def checked_step(swarm, *args, **kwargs):
            real_step(swarm, *args, **kwargs)
            checked["n"] += 1
            assert np.all(swarm.positions >= spec.bounds.lower)
            assert np.all(swarm.positions <= spec.bounds.upper)

        monkeypatch.setattr(optimizer_module, "pso_step", checked_step)
        run_ampso(config, spec, seed=3)
        assert checked["n"] >= 100

    def test_different_seeds_diverge(self):
        spec = make_spec("rastrigin", 3)
        config = AmpsoConfig(fe_budget=4000)
        a = run_ampso(config, spec, seed=1)
        b = run_ampso(config, spec, seed=2)
        assert not np.array_equal(a.best_position, b.best_position)

    def test_seed_falls_back_to_config(self):
        spec = make_spec("sphere", 2)
        config = AmpsoConfig(fe_budget=2000, seed=77)
        a = run_ampso(config, spec)
        b = run_ampso(config, spec, seed=77)
        assert np.array_equal(a.best_position, b.best_position)


class TestPhaseState:
    def test_phase_boundary_resets_swarm_local_counters(self):
        state = PhaseState(EXPLORATION, window=50)
        for _ in range(5):
            state.advance()
        state.history.record(1.0)
        state.stagnation.bump()
        state.enter(EXPLOITATION)
        assert state.phase == EXPLOITATION
        assert state.t == 0
        assert state.history.iteration == 0
        assert state.stagnation.count == 0
        assert state.iterations_done == 5  # survives the boundary


class TestRunGpso:
    def test_determinism(self, sphere_run):
        config, spec, result = sphere_run
        again = run_gpso(config, spec, seed=5)
        assert again.best_error == result.best_error
        assert [p.fe for p in again.trace] == [p.fe for p in result.trace]

    def test_final_error_beats_initial_swarm(self, sphere_run):
        _, _, result = sphere_run
        assert result.best_error < result.trace[0].best_error

    def test_budget_law(self, sphere_run):
        config, spec, result = sphere_run
        budget = config.resolved_budget(spec.dimension)
        assert budget - config.convergence_size < result.fe_used <= budget

    def test_iteration_cost_is_swarm_size(self, sphere_run):
        config, _, result = sphere_run
        fes = [p.fe for p in result.trace]
        assert all(b - a == config.convergence_size for a, b in zip(fes, fes[1:]))

    def test_single_phase_log(self, sphere_run):
        _, _, result = sphere_run
        assert [s.phase for s in result.phase_log] == ["gpso"]
