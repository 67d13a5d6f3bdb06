import math

import numpy as np
import pytest

from conftest import randf
from groupoidal import interp, measure
from groupoidal.convalg import GFunction, delta_function, involution
from groupoidal.interp import (
    DEFAULT_T_GRID,
    EpsilonRuleViolated,
    SizeCapExceeded,
    ZeroFunction,
    abc_partition,
    build_duality_witness,
    duality_witness_scan,
    f_z,
    line_half_estimate,
    line_one_estimate,
    strip_family,
    tensor_sharpening,
    xi_z_scan,
)
from groupoidal.measure import BadExponent, lp_norm, mixed_norm
from groupoidal.nclp import conjugate_exponent, fourier_p, lq_norm


def normalized(ctx, f, p):
    q = conjugate_exponent(p)
    m = max(
        mixed_norm(ctx.mg, f, p, q), mixed_norm(ctx.mg, involution(f), p, q)
    )
    return GFunction(ctx.mg, f.values / m)


NON_UNIMODULAR = ("pair2_skew", "pair3_skew", "action_swap", "product_z2_pair2")


class TestStripFamily:
    def test_z2_hand_values(self, contexts):
        ctx = contexts["z2"]
        fam = strip_family(ctx, GFunction(ctx.mg, [1.0, 1.0]), 4 / 3)
        assert np.allclose(fam.m_matrix, 2.0**0.75)
        assert fam.eps == pytest.approx(2.0 ** (-3.0 / 8.0), rel=1e-12)

    def test_single_arrow_support_pattern(self, contexts):
        ctx = contexts["pair3_skew"]
        g = ctx.mg.groupoid
        arrow = 1  # a non-unit arrow
        fam = strip_family(ctx, delta_function(ctx.mg, arrow), 1.5)
        x = g.unit_pos[g.r[arrow]]
        y = g.unit_pos[g.s[arrow]]
        for i in range(g.n_units):
            for j in range(g.n_units):
                if i == x or j == y:
                    assert fam.m_matrix[i, j] > 0
                else:
                    assert fam.m_matrix[i, j] == 0

    def test_eps_override_rule(self, contexts):
        ctx = contexts["z2"]
        f = GFunction(ctx.mg, [1.0, 1.0])
        fam = strip_family(ctx, f, 4 / 3, eps=0.5)  # admissible
        assert fam.eps == 0.5
        with pytest.raises(EpsilonRuleViolated):
            strip_family(ctx, f, 4 / 3, eps=10.0)

    def test_bad_exponent_and_zero(self, contexts):
        ctx = contexts["z2"]
        f = GFunction(ctx.mg, [1.0, 1.0])
        for p in (1.0, 2.0, 0.5):
            with pytest.raises(BadExponent):
                strip_family(ctx, f, p)
        with pytest.raises(ZeroFunction):
            strip_family(ctx, GFunction(ctx.mg, [0.0, 0.0]), 1.5)


class TestFz:
    def test_identity_at_inverse_p(self, contexts, rng):
        for ctx in contexts.values():
            for p in (1.25, 4 / 3, 1.5, 1.75):
                f = normalized(ctx, randf(ctx.mg, rng), p)
                fam = strip_family(ctx, f, p)
                assert np.array_equal(f_z(fam, fam.p_inv).values, f.values)

    def test_unimodular_flat_formula(self, contexts):
        # |f| = 1 on support: f_z = sgn f * M_eps^(q - z(p+q))
        ctx = contexts["z2"]
        f = GFunction(ctx.mg, [1.0, -1.0])
        fam = strip_family(ctx, f, 4 / 3)
        z = 0.8 + 0.3j
        me = fam.m_eps[0, 0]
        want = f.values * me ** (4.0 - (16.0 / 3.0) * z)
        assert np.allclose(f_z(fam, z).values, want, rtol=1e-12)

    def test_modulus_independent_of_t(self, contexts, rng):
        ctx = contexts["pair2_skew"]
        f = normalized(ctx, randf(ctx.mg, rng), 1.5)
        fam = strip_family(ctx, f, 1.5)
        base = np.abs(f_z(fam, 0.7).values)
        for t in (0.5, -2.0, 11.0):
            assert np.allclose(np.abs(f_z(fam, 0.7 + 1j * t).values), base, rtol=1e-12)


class TestLineOne:
    def test_extremal_z2(self, contexts):
        ctx = contexts["z2"]
        f = normalized(ctx, GFunction(ctx.mg, [1.0, 1.0]), 4 / 3)
        fam = strip_family(ctx, f, 4 / 3)
        for rec in line_one_estimate(fam, (0.0, 0.5, -0.5, 2.0, -2.0)):
            assert rec.norm_1inf <= 2.0 + 1e-9
            assert rec.norm_1inf_star <= 2.0 + 1e-9
            assert rec.opnorm <= 2.0 + 1e-9

    def test_single_arrow_bound_one(self, contexts):
        ctx = contexts["pair2_skew"]
        f = normalized(ctx, delta_function(ctx.mg, 1), 1.5)
        fam = strip_family(ctx, f, 1.5)
        rec = line_one_estimate(fam, (0.0,))[0]
        assert rec.norm_1inf <= 1.0 + 1e-9

    def test_t_independent(self, contexts, rng):
        ctx = contexts["pair3_skew"]
        f = normalized(ctx, randf(ctx.mg, rng), 1.5)
        fam = strip_family(ctx, f, 1.5)
        recs = line_one_estimate(fam, (0.0, 1.5, -3.0))
        assert np.allclose(
            [r.norm_1inf for r in recs], recs[0].norm_1inf, rtol=1e-10
        )

    def test_bound_two_everywhere(self, contexts, rng):
        for ctx in contexts.values():
            for p in (1.25, 1.5, 1.75):
                f = normalized(ctx, randf(ctx.mg, rng), p)
                fam = strip_family(ctx, f, p)
                for rec in line_one_estimate(fam):
                    assert max(rec.norm_1inf, rec.norm_1inf_star) <= 2.0 + 1e-9
                    assert rec.opnorm <= 2.0 + 1e-9


class TestLineHalf:
    def test_partition_covers_support(self, contexts, rng):
        for ctx in contexts.values():
            f = normalized(ctx, randf(ctx.mg, rng), 1.5)
            fam = strip_family(ctx, f, 1.5)
            a, b, c = abc_partition(fam)
            sup = f.values != 0
            assert np.array_equal(a | b | c, sup)
            assert not np.any(a & b) and not np.any(a & c) and not np.any(b & c)
            # C is exactly where the clipped maximum sits at eps
            g = ctx.mg.groupoid
            m_arrow = fam.m_matrix[g.unit_pos[g.r], g.unit_pos[g.s]]
            assert np.all(m_arrow[c] <= fam.eps + 1e-15)

    def test_extremal_z2_a_part(self, contexts):
        ctx = contexts["z2"]
        f = normalized(ctx, GFunction(ctx.mg, [1.0, 1.0]), 4 / 3)
        fam = strip_family(ctx, f, 4 / 3)
        rec = line_half_estimate(fam, (0.0,))[0]
        q = fam.q
        assert rec.parts_nu[0] == pytest.approx(
            mixed_norm(ctx.mg, f, fam.p, q) ** q, rel=1e-10
        )

    def test_c_empty_for_small_eps(self, contexts, rng):
        ctx = contexts["z3"]
        f = normalized(ctx, GFunction(ctx.mg, [1.0, 1.0, 1.0]), 1.5)
        fam0 = strip_family(ctx, f, 1.5)
        eps = min(fam0.m_matrix[fam0.m_matrix > 0]) / 2.0
        fam = strip_family(ctx, f, 1.5, eps=eps)
        rec = line_half_estimate(fam, (0.0,))[0]
        assert rec.parts_nu[2] == 0.0 and rec.parts_nu_inv[2] == 0.0

    def test_f2_is_plancherel_of_fz(self, contexts, rng):
        from groupoidal.convalg import delta_twist

        ctx = contexts["pair2_skew"]
        f = normalized(ctx, randf(ctx.mg, rng), 4 / 3)
        fam = strip_family(ctx, f, 4 / 3)
        t = 0.5
        rec = line_half_estimate(fam, (t,))[0]
        fz = f_z(fam, 0.5 + 1j * t)
        want = lp_norm(ctx.mg, delta_twist(fz, 0.5j * t), 2.0, "nu0")
        assert rec.f2_norm == pytest.approx(want, rel=1e-9)

    def test_matched_parts_bounded_by_one(self, contexts, rng):
        # the fiber-matched estimates: A against nu, B against nu_inv, C both
        for ctx in contexts.values():
            for p in (1.25, 1.5, 1.75):
                f = normalized(ctx, randf(ctx.mg, rng), p)
                fam = strip_family(ctx, f, p)
                for rec in line_half_estimate(fam, DEFAULT_T_GRID):
                    assert rec.parts_nu[0] <= 1.0 + 1e-9
                    assert rec.parts_nu_inv[1] <= 1.0 + 1e-9
                    assert rec.parts_nu[2] <= 1.0 + 1e-9
                    assert rec.parts_nu_inv[2] <= 1.0 + 1e-9

    def test_unimodular_all_parts_bounded(self, contexts, rng):
        for name in ("z2", "z4", "s3", "pair2_uniform", "action_trivial"):
            ctx = contexts[name]
            f = normalized(ctx, randf(ctx.mg, rng), 4 / 3)
            fam = strip_family(ctx, f, 4 / 3)
            for rec in line_half_estimate(fam, (0.0, 1.0)):
                assert max(rec.parts_nu + rec.parts_nu_inv) <= 1.0 + 1e-9
                assert max(rec.total_nu, rec.total_nu_inv) <= 3.0 + 1e-9
                assert rec.f2_norm <= math.sqrt(3.0) + 1e-9

    @pytest.mark.xfail(
        strict=True,
        reason="the cross-measure partial bounds of the inner-line estimate "
        "fail on non-unimodular groupoids; the fiber grouping only matches "
        "the range side against nu and the source side against nu_inv "
        "(see the decisions ledger)",
    )
    def test_all_parts_bounded_as_stated(self, contexts):
        rng = np.random.default_rng(20240913)
        for name in NON_UNIMODULAR:
            ctx = contexts[name]
            for trial in range(10):
                for p in (1.25, 4 / 3, 1.5):
                    f = normalized(ctx, randf(ctx.mg, rng), p)
                    fam = strip_family(ctx, f, p)
                    for rec in line_half_estimate(fam, (0.0,)):
                        assert max(rec.parts_nu + rec.parts_nu_inv) <= 1.0 + 1e-9


class TestXiScan:
    def test_value_at_inverse_p_is_fourier(self, contexts, rng):
        ctx = contexts["pair2_skew"]
        p = 4 / 3
        f = normalized(ctx, randf(ctx.mg, rng), p)
        fam = strip_family(ctx, f, p)
        xi = randf(ctx.mg, rng)
        got = interp._xi_z_vector(fam, fam.p_inv, ctx.to_coords(xi))
        want = fourier_p(ctx, f, p).matrix @ ctx.to_coords(xi)
        assert np.abs(got - want).max() <= 1e-10 * max(1.0, np.abs(want).max())

    def test_zero_vector(self, contexts, rng):
        ctx = contexts["z2"]
        f = normalized(ctx, GFunction(ctx.mg, [1.0, 1.0]), 1.5)
        fam = strip_family(ctx, f, 1.5)
        scan = xi_z_scan(fam, GFunction(ctx.mg, [0.0, 0.0]))
        assert scan.sup_boundary == 0.0 and scan.sup_interior == 0.0

    def test_boundary_bound_and_analyticity(self, contexts, rng):
        for ctx in contexts.values():
            for p in (1.25, 1.75):
                f = normalized(ctx, randf(ctx.mg, rng), p)
                fam = strip_family(ctx, f, p)
                scan = xi_z_scan(fam, randf(ctx.mg, rng), rng=rng)
                assert scan.sup_boundary <= scan.bound * (1 + 1e-9)
                assert scan.analyticity_residual <= 1e-10


class TestDualityWitness:
    def test_zero_generator_rejected(self, contexts):
        ctx = contexts["z2"]
        f = normalized(ctx, GFunction(ctx.mg, [1.0, 1.0]), 1.5)
        fam = strip_family(ctx, f, 1.5)
        zero = GFunction(ctx.mg, [0.0, 0.0])
        with pytest.raises(ZeroFunction):
            build_duality_witness(fam, zero, f, f)

    def test_scan_bounds(self, contexts, rng):
        for name in ("z2", "pair2_uniform", "pair2_skew"):
            ctx = contexts[name]
            for p in (1.25, 4 / 3, 1.5):
                f = normalized(ctx, randf(ctx.mg, rng), p)
                fam = strip_family(ctx, f, p)
                wit = build_duality_witness(
                    fam, randf(ctx.mg, rng), randf(ctx.mg, rng), randf(ctx.mg, rng)
                )
                assert wit.reconstruction_residual <= 1e-10
                scan = duality_witness_scan(fam, wit)
                assert scan.sup_abs <= scan.bound + 1e-9
                assert scan.cauchy_schwarz_margin >= -1e-9
                assert scan.h_at_p_inv_residual <= 1e-9


class TestTensorSharpening:
    def test_z2_first_power(self, contexts, rng):
        ctx = contexts["z2"]
        f = randf(ctx.mg, rng)
        rep = tensor_sharpening(ctx, f, 4 / 3, 1)
        assert rep.mult_residual <= 1e-7
        want = math.sqrt(2.0) * math.sqrt(
            mixed_norm(ctx.mg, f, 4 / 3, 4.0)
            * mixed_norm(ctx.mg, involution(f), 4 / 3, 4.0)
        )
        assert rep.bounds[0] == pytest.approx(want, rel=1e-12)
        assert rep.fp_norm <= rep.bounds[0] * (1 + 1e-9)

    def test_two_powers_sharpen(self, contexts, rng):
        ctx = contexts["z2"]
        f = randf(ctx.mg, rng)
        rep = tensor_sharpening(ctx, f, 1.5, 2)
        assert rep.power == 4
        assert rep.mult_residual <= 1e-7
        assert rep.bounds[1] <= rep.bounds[0]
        assert rep.fp_norm <= rep.bounds[1] * (1 + 1e-9)

    def test_geometric_mean_bound(self, contexts, rng):
        for ctx in contexts.values():
            f = randf(ctx.mg, rng)
            for p in (1.0, 4 / 3, 2.0):
                q = conjugate_exponent(p)
                geo = math.sqrt(
                    mixed_norm(ctx.mg, f, p, q)
                    * mixed_norm(ctx.mg, involution(f), p, q)
                )
                assert lq_norm(ctx, f, q) <= geo * (1 + 1e-9)

    def test_self_adjoint_reduces_to_max(self, contexts, rng):
        ctx = contexts["pair2_uniform"]
        f0 = randf(ctx.mg, rng)
        f = 0.5 * (f0 + involution(f0))
        rep = tensor_sharpening(ctx, f, 1.5, 1)
        assert rep.geo_bound == pytest.approx(rep.max_bound, rel=1e-12)

    def test_size_cap(self, contexts, rng):
        ctx = contexts["pair3_uniform"]  # 9 arrows: 9^4 = 6561 > 256
        with pytest.raises(SizeCapExceeded):
            tensor_sharpening(ctx, randf(ctx.mg, rng), 1.5, 2)
