import pytest

from flatgeom import corpus
from flatgeom.errors import InvalidConfig, InvalidSequence
from flatgeom.matroid import uniform_matroid
from flatgeom.pingpong import (
    PPSConfig,
    PPSSequence,
    pps_candidates,
    pps_find_cycle,
    pps_run,
    pps_verify,
)

# gf2_3 ids: 0=e3, 1=e2, 2=e2+e3, 3=e1, 4=e1+e3, 5=e1+e2, 6=e1+e2+e3
GF2_CFG = PPSConfig.of((), a1=3, a2=1, t1=0)
# Forced by unique candidates at each step; repeats t1 after four hits.
GF2_FORCED = (0, 4, 6, 2, 0)


class TestCandidates:
    def test_gf2_first_step_is_forced(self, gf2):
        seq = PPSSequence(GF2_CFG, (0,))
        assert pps_candidates(gf2, seq) == [4]  # e1+e3

    def test_uniform_terminates_immediately(self):
        m = uniform_matroid(3, 6)
        cfg = PPSConfig.of((), 0, 1, 2)
        assert pps_candidates(m, PPSSequence(cfg, (2,))) == []

    def test_rank_two_geometry_hosts_no_config(self):
        m = uniform_matroid(2, 3)
        for a1 in range(3):
            for a2 in range(3):
                if a1 == a2:
                    continue
                for t1 in range(3):
                    with pytest.raises(InvalidConfig):
                        PPSConfig.of((), a1, a2, t1).validate(m)

    def test_invalid_sequence_rejected(self, gf2):
        seq = PPSSequence(GF2_CFG, (0, 6))  # 6 not in cl(e1, e3)
        with pytest.raises(InvalidSequence):
            pps_candidates(gf2, seq)


class TestRun:
    def test_forced_cycle(self, gf2):
        runs = pps_run(gf2, GF2_CFG, "least", 32)
        assert len(runs) == 1
        run = runs[0]
        assert run.sequence.ts == GF2_FORCED
        assert run.status == "cycle"
        assert run.repeat_index == 1
        assert run.cycle_length == 4

    def test_uniform_single_terminated_run(self):
        m = uniform_matroid(3, 6)
        runs = pps_run(m, PPSConfig.of((), 0, 1, 2), "least", 8)
        assert len(runs) == 1
        assert runs[0].sequence.ts == (2,)
        assert runs[0].status == "terminated"

    def test_budget_cuts_prefix(self, gf2):
        runs = pps_run(gf2, GF2_CFG, "least", 2)
        assert runs[0].sequence.ts == GF2_FORCED[:2]
        assert runs[0].status == "budget"

    def test_all_branches_on_gf2_is_the_forced_run(self, gf2):
        runs = pps_run(gf2, GF2_CFG, "all-branches", 32)
        assert [r.sequence.ts for r in runs] == [GF2_FORCED]


class TestVerify:
    def test_forced_run_report(self, gf2):
        report = pps_verify(gf2, PPSSequence(GF2_CFG, GF2_FORCED))
        assert report.config_valid and report.steps_valid
        assert report.outside_paddle_span
        assert not report.injective  # the repeat is the point

    def test_length_one_sequence_all_hold(self, gf2):
        report = pps_verify(gf2, PPSSequence(GF2_CFG, (0,)))
        assert report.ok

    def test_consecutive_window_is_again_valid(self, gf2):
        # Re-based on its start, with paddles swapped when the window
        # starts at an even index.
        ts = GF2_FORCED
        for start in range(len(ts) - 1):
            if start % 2 == 0:
                cfg = PPSConfig.of((), GF2_CFG.a1, GF2_CFG.a2, ts[start])
            else:
                cfg = PPSConfig.of((), GF2_CFG.a2, GF2_CFG.a1, ts[start])
            window = ts[start : start + 2]
            report = pps_verify(gf2, PPSSequence(cfg, window))
            assert report.config_valid and report.steps_valid


class TestCycleSearch:
    def test_gf2_finds_length_four_cycle(self, gf2):
        res = pps_find_cycle(gf2, 32)
        assert res.status == "found"
        assert res.run.cycle_length == 4
        report = pps_verify(gf2, res.run.sequence)
        assert report.steps_valid and report.outside_paddle_span
        assert not report.injective

    def test_gf3_finds_cycle(self, gf3):
        res = pps_find_cycle(gf3, 32)
        assert res.status == "found"
        assert res.run.cycle_length == 4

    def test_rank_two_geometry_has_none(self):
        res = pps_find_cycle(uniform_matroid(2, 3), 32)
        assert res.status == "none"
        assert res.configs_searched == 0

    def test_flat_members_have_none(self, small_corpus):
        for name in ("uniform_2_3", "uniform_3_4", "gf3_2", "pps_chain", "ct_u23"):
            res = pps_find_cycle(small_corpus[name], 32)
            assert res.status == "none", name

    def test_degenerate_two_cycle_without_paddle_use(self, small_corpus):
        # Two elements interalgebraic over the net alone can bounce
        # forever whatever the paddles; such a repeat has cycle length 2
        # and certifies nothing about flatness.
        res = pps_find_cycle(small_corpus["u23_plus_2_free"], 32)
        assert res.status == "found"
        assert res.run.cycle_length == 2
        t_prev, t_new = res.run.sequence.ts[-2], res.run.sequence.ts[-1]
        m = small_corpus["u23_plus_2_free"]
        net = frozenset(res.run.sequence.config.net)
        assert t_new in m.closure(net | {t_prev})

    def test_every_generated_element_stays_outside_paddle_span(self, small_corpus):
        for name, m in small_corpus.items():
            if m.full_rank < 3:
                continue
            res = pps_find_cycle(m, 16)
            if res.run is not None:
                report = pps_verify(m, res.run.sequence)
                assert report.outside_paddle_span, name
