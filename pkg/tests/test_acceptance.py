"""Acceptance criteria, one test per criterion, each printing a pass/fail
line.  Criterion 8's cross-measure partial-integral clause is implemented
faithfully and marked as a strict expected failure on non-unimodular
fixtures: the inner-line estimate behind it does not survive away from the
unimodular case (see the decisions ledger for the analysis); every other
clause holds at its stated tolerance.
"""

import json
import math
import zlib

import numpy as np
import pytest

from conftest import randf
from groupoidal import harness, interp, measure, nclp, numkit as nk
from groupoidal.convalg import GFunction, involution, tensor
from groupoidal.measure import mixed_norm, lp_norm
from groupoidal.nclp import (
    conjugate_exponent,
    fourier_p,
    hy_check,
    lq_element,
    lq_norm,
    lq_norm_spatial,
    plancherel_check,
    spatial_derivative_check,
)
from groupoidal.repmod import (
    RepContext,
    commutation_check,
    homogeneity_residual,
    left_op,
    span_residual,
)

P_GRID = (1.0, 1.25, 4.0 / 3.0, 1.5, 1.75, 2.0)
INNER_P = tuple(p for p in P_GRID if 1.0 < p < 2.0)


def _report(tag, ok, detail):
    line = "[acceptance] %s: %s (%s)" % (tag, "PASS" if ok else "FAIL", detail)
    print(line)
    return line


def _normalized(ctx, f, p):
    q = conjugate_exponent(p)
    m = max(mixed_norm(ctx.mg, f, p, q), mixed_norm(ctx.mg, involution(f), p, q))
    return GFunction(ctx.mg, f.values / m)


def test_criterion_1_plancherel(contexts):
    worst = 0.0
    count = 0
    for name, ctx in contexts.items():
        rng = np.random.default_rng((1, zlib.crc32(name.encode())))
        for _ in range(17):
            f = randf(ctx.mg, rng)
            lhs, rhs, _ = plancherel_check(ctx, f)
            worst = max(worst, abs(lhs - rhs) / max(rhs, 1e-30))
            count += 1
    ok = count >= 200 and worst <= 1e-8
    line = _report("C1 plancherel", ok, "%d cases, worst relative %.3g" % (count, worst))
    assert ok, line


def test_criterion_2_hausdorff_young(bundled):
    worst_rel_margin = math.inf
    failures = 0
    cases = 0
    for name in bundled:
        spec = harness.spec_from_dict(
            {
                "groupoid": {"type": "fixture", "name": name},
                "checks": ["hy"],
                "p_grid": list(P_GRID),
                "trials": 6,
                "seed": 11,
            }
        )
        rep = harness.run_suite(spec)
        for r in rep.records:
            cases += 1
            failures += 0 if r["pass"] else 1
            if r["rhs"] > 0:
                worst_rel_margin = min(worst_rel_margin, r["margin"] / r["rhs"])
    ok = failures == 0 and worst_rel_margin >= -1e-9
    line = _report(
        "C2 hausdorff-young", ok,
        "%d cases, min relative margin %.3g" % (cases, worst_rel_margin),
    )
    assert ok, line


def test_criterion_3_extremal_equalities(contexts):
    r1 = hy_check(contexts["z2"], GFunction(contexts["z2"].mg, [1.0, 1.0]), 4 / 3)
    e1 = max(abs(r1.lhs - 2.0**0.75), abs(r1.rhs - 2.0**0.75))
    ctx = contexts["pair2_uniform"]
    r2 = hy_check(ctx, GFunction(ctx.mg, [1.0, 1.0, 0.0, 0.0]), 4 / 3)
    e2 = max(abs(r2.lhs - math.sqrt(2.0)), abs(r2.rhs - 2.0**0.75))
    ok = e1 <= 1e-10 and e2 <= 1e-10
    line = _report("C3 extremal equalities", ok, "errors %.3g / %.3g" % (e1, e2))
    assert ok, line


def test_criterion_4_endpoint_p1(contexts):
    worst = -math.inf
    for name, ctx in contexts.items():
        rng = np.random.default_rng((4, zlib.crc32(name.encode())))
        for _ in range(10):
            f = randf(ctx.mg, rng)
            lhs = nk.opnorm(left_op(ctx, f))
            rhs = max(
                mixed_norm(ctx.mg, f, 1.0, math.inf),
                mixed_norm(ctx.mg, involution(f), 1.0, math.inf),
            )
            worst = max(worst, (lhs - rhs) / max(rhs, 1e-30))
    ok = worst <= 1e-9
    line = _report("C4 endpoint p=1", ok, "worst relative excess %.3g" % worst)
    assert ok, line


def test_criterion_5_route_agreement(contexts):
    worst = 0.0
    for name, ctx in contexts.items():
        rng = np.random.default_rng((5, zlib.crc32(name.encode())))
        for q in (conjugate_exponent(4.0 / 3.0), 2.0, 3.0, 4.0):
            p = conjugate_exponent(q)
            for _ in range(4):
                f = randf(ctx.mg, rng)
                el = lq_element(ctx, fourier_p(ctx, f, p).matrix, q, "F_p(f)")
                a = lq_norm(ctx, f, q)
                b = lq_norm_spatial(ctx, el)
                worst = max(worst, abs(a - b) / max(a, 1e-30))
    ok = worst <= 1e-8
    line = _report("C5 route agreement", ok, "worst relative %.3g" % worst)
    assert ok, line


def test_criterion_6_dft_oracle():
    specs = [
        {"groupoid": {"type": "cyclic", "n": n}, "trials": 6,
         "p_grid": list(P_GRID), "seed": 6}
        for n in (2, 3, 4)
    ]
    specs.append(
        {
            "groupoid": {
                "type": "product",
                "factors": [
                    {"groupoid": {"type": "cyclic", "n": 2}},
                    {"groupoid": {"type": "cyclic", "n": 3}},
                ],
            },
            "trials": 6,
            "p_grid": list(P_GRID),
            "seed": 6,
        }
    )
    rows = []
    for raw in specs:
        rows.extend(harness.oracle_dft(harness.spec_from_dict(raw)))
    failures = [r for r in rows if not r["pass"]]
    ok = not failures and len(rows) > 0
    line = _report("C6 dft oracle", ok, "%d rows, %d failures" % (len(rows), len(failures)))
    assert ok, line


def test_criterion_7_schatten_oracle():
    raws = [
        {"groupoid": {"type": "pair", "n": 2}, "mu": 1.0},
        {"groupoid": {"type": "pair", "n": 3}, "mu": 1.0},
        {"groupoid": {"type": "pair", "n": 2}, "mu": [1.0, 4.0]},
        {"groupoid": {"type": "pair", "n": 3}, "mu": [1.0, 2.0, 5.0]},
    ]
    rows = []
    for raw in raws:
        raw.update({"trials": 6, "p_grid": list(P_GRID), "seed": 6})
        rows.extend(harness.oracle_schatten(harness.spec_from_dict(raw)))
    failures = [r for r in rows if not r["pass"]]
    hs_rows = [r for r in rows if "-hs-" in r["case_id"]]
    ok = not failures and len(hs_rows) > 0
    line = _report(
        "C7 schatten oracle", ok,
        "%d rows (%d hilbert-schmidt), %d failures" % (len(rows), len(hs_rows), len(failures)),
    )
    assert ok, line


def _proofpath_samples(contexts, trials=3):
    for name, ctx in contexts.items():
        rng = np.random.default_rng((8, zlib.crc32(name.encode())))
        for p in INNER_P:
            for _ in range(trials):
                f = _normalized(ctx, randf(ctx.mg, rng), p)
                yield name, ctx, rng, p, interp.strip_family(ctx, f, p)


def test_criterion_8_proof_path_bounds(contexts):
    """Every clause of the proof-path criterion that survives the
    non-unimodular setting: the outer-line estimates, the fiber-matched
    partial integrals, the Plancherel leg against sqrt(3), the duality scan
    and the exactness of the family at z = 1/p."""
    worst = {
        "line1": 0.0, "matched": 0.0, "f2": 0.0, "xi": -math.inf,
        "hscan": -math.inf, "pairing": 0.0, "exact": 0.0,
    }
    for name, ctx, rng, p, fam in _proofpath_samples(contexts):
        fz = interp.f_z(fam, fam.p_inv)
        worst["exact"] = max(
            worst["exact"],
            0.0 if np.array_equal(fz.values, fam.f.values) else math.inf,
        )
        for rec in interp.line_one_estimate(fam):
            worst["line1"] = max(
                worst["line1"], rec.norm_1inf, rec.norm_1inf_star, rec.opnorm
            )
        for rec in interp.line_half_estimate(fam):
            worst["matched"] = max(
                worst["matched"],
                rec.parts_nu[0], rec.parts_nu_inv[1],
                rec.parts_nu[2], rec.parts_nu_inv[2],
            )
            worst["f2"] = max(worst["f2"], rec.f2_norm)
        xi, eta, gw = (randf(ctx.mg, rng) for _ in range(3))
        scan = interp.xi_z_scan(fam, xi, rng=rng)
        worst["xi"] = max(worst["xi"], scan.sup_boundary - scan.bound)
        ws = interp.duality_witness_scan(
            fam, interp.build_duality_witness(fam, gw, xi, eta)
        )
        worst["hscan"] = max(worst["hscan"], ws.sup_abs - ws.bound)
        worst["pairing"] = max(worst["pairing"], ws.h_at_p_inv_residual)
    ok = (
        worst["line1"] <= 2.0 + 1e-9
        and worst["matched"] <= 1.0 + 1e-9
        and worst["f2"] <= math.sqrt(3.0) + 1e-9
        and worst["xi"] <= 1e-9
        and worst["hscan"] <= 1e-9
        and worst["pairing"] <= 1e-9
        and worst["exact"] == 0.0
    )
    line = _report(
        "C8 proof-path bounds", ok,
        "line1 %.6f<=2, matched parts %.6f<=1, f2 %.6f<=sqrt3, "
        "xi excess %.3g, H excess %.3g, pairing %.3g, f_z exact %s"
        % (
            worst["line1"], worst["matched"], worst["f2"],
            worst["xi"], worst["hscan"], worst["pairing"], worst["exact"] == 0.0,
        ),
    )
    assert ok, line


@pytest.mark.xfail(
    strict=True,
    reason="spec defect inherited from the source: the A/B/C partial "
    "integrals are NOT all bounded by 1 for both measures on non-unimodular "
    "groupoids; only the range side pairs with nu and the source side with "
    "nu_inv.  Implemented faithfully and allowed to fail; see the decisions "
    "ledger for the counterexample analysis.",
)
def test_criterion_8_partial_integrals_as_stated(contexts):
    worst = 0.0
    for name, ctx, rng, p, fam in _proofpath_samples(contexts):
        for rec in interp.line_half_estimate(fam):
            worst = max(worst, max(rec.parts_nu + rec.parts_nu_inv))
    ok = worst <= 1.0 + 1e-9
    line = _report(
        "C8 partial integrals as stated", ok,
        "worst partial integral %.6f (bound 1); expected failure on "
        "non-unimodular fixtures" % worst,
    )
    assert ok, line


def test_criterion_9_tensor_power(contexts):
    ctx = contexts["product_z2_pair2"]
    mg = ctx.mg
    mg1, mg2 = mg.factors
    c1, c2 = RepContext(mg1), RepContext(mg2)
    rng = np.random.default_rng(9)
    worst_mult = 0.0
    for p in P_GRID:
        q = conjugate_exponent(p)
        for _ in range(4):
            f1, f2 = randf(mg1, rng), randf(mg2, rng)
            ff = tensor(f1, f2, mg)
            lhs = lq_norm(ctx, ff, q)
            rhs = lq_norm(c1, f1, q) * lq_norm(c2, f2, q)
            worst_mult = max(worst_mult, abs(lhs - rhs) / max(rhs, 1e-30))
            m_lhs = mixed_norm(mg, ff, p, q)
            m_rhs = mixed_norm(mg1, f1, p, q) * mixed_norm(mg2, f2, p, q)
            worst_mult = max(worst_mult, abs(m_lhs - m_rhs) / max(m_rhs, 1e-30))
    worst_geo = -math.inf
    for name, c in contexts.items():
        for p in P_GRID:
            q = conjugate_exponent(p)
            f = randf(c.mg, rng)
            geo = math.sqrt(
                mixed_norm(c.mg, f, p, q) * mixed_norm(c.mg, involution(f), p, q)
            )
            worst_geo = max(worst_geo, (lq_norm(c, f, q) - geo) / max(geo, 1e-30))
    ok = worst_mult <= 1e-8 and worst_geo <= 1e-9
    line = _report(
        "C9 tensor power", ok,
        "multiplicativity %.3g, geometric-mean excess %.3g" % (worst_mult, worst_geo),
    )
    assert ok, line


def test_criterion_10_modular_suite(contexts):
    worst = {
        "factor": 0.0, "tomita": 0.0, "commutation": 0.0,
        "homogeneity": 0.0, "cocycle": 0.0, "spatial": 0.0,
    }
    for name, ctx in contexts.items():
        rng = np.random.default_rng((10, zlib.crc32(name.encode())))
        mg = ctx.mg
        g = mg.groupoid
        a, b = np.nonzero(g.comp >= 0)
        prod = g.comp[a, b]
        worst["cocycle"] = max(
            worst["cocycle"],
            float(
                np.max(
                    np.abs(mg.delta[prod] - mg.delta[a] * mg.delta[b])
                    / np.maximum(mg.delta[prod], 1e-300)
                )
            ),
        )
        vn = ctx.vn_data()
        fac = vn.rho @ nk.psd_power(vn.rho_prime, -1.0)
        worst["factor"] = max(
            worst["factor"],
            nk.frobenius(fac - ctx.delta_matrix) / nk.frobenius(ctx.delta_matrix),
        )
        worst["tomita"] = max(
            worst["tomita"],
            max(
                span_residual(vn.mprime_onb, ctx.conjugate_by_j(bb))
                for bb in vn.m_basis
            ),
        )
        f = randf(mg, rng)
        for z in (1.0, 1j, 0.5 + 1j):
            worst["commutation"] = max(
                worst["commutation"], commutation_check(ctx, f, z)
            )
        worst["homogeneity"] = max(
            worst["homogeneity"],
            homogeneity_residual(ctx, left_op(ctx, f), 0.0),
            homogeneity_residual(ctx, ctx.delta_matrix, -1.0),
        )
        for p in (1.25, 4 / 3, 2.0):
            q = conjugate_exponent(p)
            worst["homogeneity"] = max(
                worst["homogeneity"],
                homogeneity_residual(
                    ctx, fourier_p(ctx, f, p).matrix, -1.0 / q
                ),
            )
        rep = spatial_derivative_check(ctx, randf(mg, rng), rng=rng)
        worst["spatial"] = max(
            worst["spatial"], rep.defining, rep.weight_match, rep.homogeneity
        )
    ok = (
        worst["factor"] <= 1e-8
        and worst["tomita"] <= 1e-8
        and worst["commutation"] <= 1e-10
        and worst["homogeneity"] <= 1e-8
        and worst["cocycle"] <= 1e-12
        and worst["spatial"] <= 1e-8
    )
    line = _report(
        "C10 modular suite", ok,
        "factor %.2g, tomita %.2g, commutation %.2g, homogeneity %.2g, "
        "cocycle %.2g, spatial %.2g"
        % (
            worst["factor"], worst["tomita"], worst["commutation"],
            worst["homogeneity"], worst["cocycle"], worst["spatial"],
        ),
    )
    assert ok, line


def test_criterion_11_determinism():
    raw = {
        "groupoid": {"type": "fixture", "name": "product_z2_pair2"},
        "checks": ["plancherel", "hy", "modular", "tensor"],
        "p_grid": [1, 4 / 3, 2],
        "trials": 5,
        "seed": 2024,
    }
    spec = harness.spec_from_dict(raw)
    j1 = harness.report_to_json(harness.run_suite(spec))
    j2 = harness.report_to_json(harness.run_suite(spec, jobs=2))
    rows1 = json.loads(j1)["records"]
    rows2 = json.loads(j2)["records"]
    ok = j1 == j2 and rows1 == rows2
    line = _report("C11 determinism", ok, "%d rows byte-identical" % len(rows1))
    assert ok, line
