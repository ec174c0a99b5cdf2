import random

import pytest

from flatgeom import corpus
from flatgeom.errors import InvalidStructure, NotIndependent
from flatgeom.formula_closure import (
    EnumeratedStructure,
    GeometricStructure,
    PsiRelation,
    acl_enumerate_via_lambda,
    certified_lambda,
    ild_estimate,
    lambda_closure,
    lambda_step,
    psi_witness_check,
)
from flatgeom.matroid import uniform_matroid


@pytest.fixture(scope="module")
def demo():
    return corpus.phi_demo()


class TestLambdaStep:
    def test_single_fiber_fires(self, demo):
        assert lambda_step(demo, {0, 1}) == frozenset({0, 1, 2})

    def test_no_matching_tuple_is_identity(self, demo):
        assert lambda_step(demo, {0, 3}) == frozenset({0, 3})

    def test_full_universe_fixed(self, demo):
        full = frozenset(demo.universe)
        assert lambda_step(demo, full) == full


class TestLambdaClosure:
    def test_demo_chain(self, demo):
        res = lambda_closure(demo, {0, 1})
        assert res.status == "fixpoint"
        assert res.fixpoint_index == 2
        assert res.closure == frozenset({0, 1, 2, 3})
        assert [sorted(s) for s in res.chain] == [[0, 1], [0, 1, 2], [0, 1, 2, 3]]

    def test_empty_start(self, demo):
        res = lambda_closure(demo, ())
        assert res.status == "fixpoint" and res.fixpoint_index == 0
        assert res.closure == frozenset()

    def test_disjoint_start_is_immediate_fixpoint(self, demo):
        res = lambda_closure(demo, {3})  # no pair from {3} meets phi
        assert res.fixpoint_index == 0 and res.closure == frozenset({3})

    def test_small_budget_reports_divergence(self, demo):
        res = lambda_closure(demo, {0, 1}, budget=1)
        assert res.status == "diverging"
        assert res.growth_trace == (2, 3)

    def test_monotone_in_the_seed(self, demo):
        rng = random.Random(7)
        universe = list(demo.universe)
        for _ in range(50):
            x = frozenset(rng.sample(universe, rng.randint(0, 3)))
            y = x | frozenset(rng.sample(universe, rng.randint(0, 2)))
            assert lambda_closure(demo, x).closure <= lambda_closure(demo, y).closure

    def test_algebraic_over_the_seed(self, demo):
        rng = random.Random(8)
        universe = list(demo.universe)
        m = demo.matroid
        for _ in range(50):
            x = frozenset(rng.sample(universe, rng.randint(0, 4)))
            lam = lambda_closure(demo, x).closure
            assert m.rank(x | lam) == m.rank(x)


class TestStructureValidation:
    def test_non_circuit_tuple_rejected(self):
        m = uniform_matroid(2, 4)
        with pytest.raises(InvalidStructure):
            GeometricStructure.of(m, [(0, 1, 2), (0, 1, 1)], 2)

    def test_fiber_bound_enforced(self):
        m = uniform_matroid(2, 4)
        # Position-2 fiber of (0,1) has two members; K=2 requires < 2.
        with pytest.raises(InvalidStructure):
            GeometricStructure.of(m, [(0, 1, 2), (0, 1, 3)], 2)
        g = GeometricStructure.of(m, [(0, 1, 2), (0, 1, 3)], 3)
        assert max(g.fiber_sizes().values()) == 2

    def test_empty_phi_rejected(self):
        with pytest.raises(InvalidStructure):
            GeometricStructure.of(uniform_matroid(2, 4), [], 2)


class TestCertifiedIteration:
    def test_incomplete_fiber_blocks_certification(self):
        enum = corpus.sigma1_chain(length=4)
        res = certified_lambda(enum, {0, 1, 3}, stage=1, budget=20)
        assert res.status == "pending"
        assert res.blocking

    def test_complete_wrap_certifies_everything(self, demo):
        enum = EnumeratedStructure.complete(demo)
        res = certified_lambda(enum, {0, 1}, stage=1, budget=10)
        assert res.status == "finite"
        assert res.chain[-1] == frozenset({0, 1, 2, 3})

    def test_growth_seed_pending_at_every_stage_and_horizon(self):
        # The chain keeps growing however far the horizon moves.
        for length in (4, 6, 9):
            enum = corpus.sigma1_chain(length=length)
            for stage in range(1, enum.final_stage + 1):
                res = certified_lambda(enum, {0, 1, 3}, stage, budget=30)
                assert res.status == "pending"
        long = corpus.sigma1_chain(length=9)
        res = certified_lambda(long, {0, 1, 3}, long.final_stage, budget=30)
        assert len(res.chain[-1]) > 9  # reached deep into the chain


class TestAclEnumeration:
    def test_enumeration_equals_the_closed_target(self):
        enum = corpus.sigma1_chain()
        res = acl_enumerate_via_lambda(enum, (0, 1), budget=enum.final_stage)
        assert res.status == "complete"
        assert res.elements == enum.structure.matroid.closure({0, 1})

    def test_base_elements_emitted_at_stage_one(self):
        enum = corpus.sigma1_chain()
        res = acl_enumerate_via_lambda(enum, (0, 1), budget=enum.final_stage)
        stages = dict(res.emitted)
        assert stages[0] == 1 and stages[1] == 1

    def test_outside_element_never_emitted(self):
        enum = corpus.sigma1_chain()
        res = acl_enumerate_via_lambda(enum, (0, 1), budget=enum.final_stage)
        assert 3 not in res.elements
        assert all(e not in res.elements for e in range(4, len(enum.structure.universe)))

    def test_budget_gives_partial_monotone_prefix(self):
        enum = corpus.sigma1_chain()
        partial = acl_enumerate_via_lambda(enum, (0, 1), budget=1)
        full = acl_enumerate_via_lambda(enum, (0, 1), budget=enum.final_stage)
        assert partial.status == "budget-exceeded"
        assert set(partial.emitted) <= set(full.emitted)

    def test_dependent_base_rejected(self):
        from flatgeom.matroid import linear_matroid

        m = linear_matroid(101, [(1, 0, 0), (2, 0, 0), (0, 1, 0), (1, 1, 0)])
        g = GeometricStructure.of(m, [(0, 2, 3)], 2)
        enum = EnumeratedStructure.complete(g)
        with pytest.raises(NotIndependent):
            acl_enumerate_via_lambda(enum, (0, 1), budget=1)  # parallel pair
        with pytest.raises(InvalidStructure):
            acl_enumerate_via_lambda(enum, (0,), budget=1)  # wrong size


class TestIld:
    def test_alternating_chain_needs_dimension_three(self):
        res = ild_estimate(corpus.ild_pps())
        assert (res.value, res.certainty) == (3, "certified")

    def test_finite_structure_has_no_growth(self, demo):
        res = ild_estimate(EnumeratedStructure.complete(demo))
        assert res.value is None and res.certainty == "certified"

    def test_tiny_budget_gives_lower_bound_only(self):
        res = ild_estimate(corpus.ild_pps(), budget=1)
        assert res.certainty == "lower-bound-only"
        assert res.value <= 3

    def test_every_lower_dimension_certified_finite(self):
        enum = corpus.ild_pps()
        m = enum.structure.matroid
        from itertools import combinations

        for size in range(3):
            for combo in combinations(enum.structure.universe, size):
                if m.rank(combo) < 3:
                    res = certified_lambda(enum, combo, enum.final_stage, 20)
                    assert res.status == "finite" or not enum.declared_infinite(combo)


class TestPsiWitness:
    def _geometry(self):
        return corpus.phi_demo()

    def test_fallback_construction_is_total(self):
        # Witness repeats the first coordinate whenever the designated
        # count is off; that guarantees a witness for every input.
        g = self._geometry()
        universe = g.universe
        designated = {(0, 1): (2,)}
        tuples = set()
        for z in [(a, b) for a in universe for b in universe]:
            if z in designated:
                tuples.add(z + designated[z])
            else:
                tuples.add(z + (z[0],))
        psi = PsiRelation(2, 1, frozenset(tuples), fiber_bound=2, isolates=True)
        report = psi_witness_check(g, psi, (0, 1), (2,))
        assert report.total and report.bounded
        assert report.isolation_declared and report.holds_on_designated
        assert report.ok

    def test_empty_fiber_breaks_totality(self):
        g = self._geometry()
        psi = PsiRelation(1, 1, frozenset({(0, 0)}), fiber_bound=2)
        report = psi_witness_check(g, psi, (0,), (0,))
        assert not report.total
        assert report.first_total_violation is not None

    def test_oversized_fiber_breaks_boundedness(self):
        g = self._geometry()
        tuples = {(z, w) for z in g.universe for w in g.universe}
        psi = PsiRelation(1, 1, frozenset(tuples), fiber_bound=2)
        report = psi_witness_check(g, psi, (0,), (0,))
        assert not report.bounded


class TestRandomizedStructures:
    def test_generator_yields_valid_structures(self):
        rng = random.Random(123)
        for _ in range(60):
            g = corpus.random_geometric_structure(rng)
            g.validate()
            res = lambda_closure(g, ())
            assert res.status == "fixpoint"

    def test_step_addition_respects_fiber_bound(self):
        # No single (position, tuple) pair ever contributes K or more
        # elements; with valid structures this holds by construction.
        rng = random.Random(5)
        for _ in range(40):
            g = corpus.random_geometric_structure(rng)
            for key, size in g.fiber_sizes().items():
                assert size < g.fiber_bound
