from __future__ import annotations

import pytest

from voi_workbench import (
    ChanceVariable,
    DecisionModel,
    DecisionVariable,
    ProbabilityInterval,
    UtilityTable,
    conjunction_bounds,
    marginal_bounds,
    parse_ref,
)


def chain_model(p_a: float = 0.5, p_b_given_a: float = 0.5) -> DecisionModel:
    """A parentless, B conditioned on A with p(B=t | A=f) = 0, so the
    marginal of B=t equals the conjunction probability."""
    a = ChanceVariable("A", ("t", "f"), (), {(): (p_a, 1.0 - p_a)})
    b = ChanceVariable(
        "B",
        ("t", "f"),
        ("A",),
        {("t",): (p_b_given_a, 1.0 - p_b_given_a), ("f",): (0.0, 1.0)},
    )
    return DecisionModel(
        (a, b), DecisionVariable("D", ("go",)), UtilityTable((), {("go", ()): 1.0})
    )


class TestConjunctionBounds:
    def test_paper_style_two_link_chain(self):
        got = conjunction_bounds(
            [ProbabilityInterval(0.4, 0.6), ProbabilityInterval(0.3, 0.8)]
        )
        assert got.low == pytest.approx(0.12, abs=1e-15)
        assert got.high == pytest.approx(0.48, abs=1e-15)

    def test_degenerate_chain_is_a_product(self):
        got = conjunction_bounds(
            [ProbabilityInterval(0.3, 0.3), ProbabilityInterval(0.7, 0.7)]
        )
        assert got.low == got.high == pytest.approx(0.21, abs=1e-15)

    def test_certain_factor_is_identity(self):
        got = conjunction_bounds(
            [ProbabilityInterval(0.4, 0.6), ProbabilityInterval(1.0, 1.0)]
        )
        assert (got.low, got.high) == (0.4, 0.6)

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            conjunction_bounds([])


class TestIntervalValidation:
    @pytest.mark.parametrize("lo,hi", [(-0.1, 0.5), (0.6, 0.5), (0.5, 1.2)])
    def test_bad_intervals_rejected(self, lo, hi):
        with pytest.raises(ValueError):
            ProbabilityInterval(lo, hi)


class TestMarginalBounds:
    def test_field_interval_bounds_win(self, football):
        report = marginal_bounds(
            football,
            [("p(Field=dry)", ProbabilityInterval(0.6, 0.8))],
            ("Win", "yes"),
        )
        # closed form: p(Win=yes) = 0.46 + 0.10 * p(dry)
        assert report.low == pytest.approx(0.52, abs=1e-9)
        assert report.high == pytest.approx(0.54, abs=1e-9)
        assert report.renormalized == ()

    def test_degenerate_overrides_reduce_to_point_marginal(self, football):
        report = marginal_bounds(
            football,
            [
                ("p(Field=dry)", ProbabilityInterval(0.7, 0.7)),
                ("p(Bonus=yes)", ProbabilityInterval(0.2, 0.2)),
            ],
            ("Win", "yes"),
        )
        assert report.low == pytest.approx(0.53, abs=1e-9)
        assert report.high == pytest.approx(0.53, abs=1e-9)

    def test_two_link_chain_agrees_with_conjunction(self):
        model = chain_model()
        report = marginal_bounds(
            model,
            [
                ("p(A=t)", ProbabilityInterval(0.4, 0.6)),
                ("p(B=t | A=t)", ProbabilityInterval(0.3, 0.8)),
            ],
            ("B", "t"),
        )
        assert report.low == pytest.approx(0.12, abs=1e-9)
        assert report.high == pytest.approx(0.48, abs=1e-9)

    def test_multi_outcome_rows_flagged_as_renormalized(self):
        x = ChanceVariable("X", ("a", "b", "c"), (), {(): (0.2, 0.3, 0.5)})
        m = DecisionModel(
            (x,), DecisionVariable("D", ("go",)), UtilityTable((), {("go", ()): 1.0})
        )
        report = marginal_bounds(
            m, [("p(X=a)", ProbabilityInterval(0.1, 0.4))], ("X", "b")
        )
        assert report.renormalized == ("p(X=a)",)
        # siblings share the remaining mass 3:5
        assert report.low == pytest.approx(0.6 * 0.375, abs=1e-12)
        assert report.high == pytest.approx(0.9 * 0.375, abs=1e-12)

    def test_override_explosion_guard(self, football):
        overrides = [
            (parse_ref(f"p(Win=yes | Sus={s}, Field={f}, Bonus={b})"), ProbabilityInterval(0.3, 0.7))
            for s in ("yes", "no")
            for f in ("dry", "wet")
            for b in ("yes", "no")
        ] + [
            ("p(Sus=yes)", ProbabilityInterval(0.4, 0.8)),
            ("p(Field=dry)", ProbabilityInterval(0.5, 0.9)),
            ("p(Bonus=yes)", ProbabilityInterval(0.1, 0.3)),
        ]
        report = marginal_bounds(football, overrides, ("Win", "yes"))
        assert report.vertices == 2 ** 11
        too_many = overrides * 2
        with pytest.raises(ValueError, match="limit"):
            marginal_bounds(football, too_many, ("Win", "yes"))

    def test_utility_override_rejected(self, football):
        with pytest.raises(ValueError):
            marginal_bounds(
                football, [("u(Bet | Win=yes)", ProbabilityInterval(0.1, 0.2))], ("Win", "yes")
            )

    def test_interval_contains_every_interior_point_marginal(self, football):
        import numpy as np

        refs = [parse_ref("p(Field=dry)"), parse_ref("p(Sus=yes)")]
        ivs = [ProbabilityInterval(0.55, 0.85), ProbabilityInterval(0.3, 0.9)]
        report = marginal_bounds(football, list(zip(refs, ivs)), ("Win", "yes"))
        rng = np.random.default_rng(0)
        for _ in range(200):
            sub = football
            for ref, iv in zip(refs, ivs):
                sub = sub.substitute(ref, rng.uniform(iv.low, iv.high))
            m = sub.marginal("Win", "yes")
            assert report.low - 1e-9 <= m <= report.high + 1e-9
