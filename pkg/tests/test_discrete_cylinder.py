import math
from fractions import Fraction as F

import numpy as np
import pytest

from coneflex.discrete_cone import FoldPair, InfeasibleError, SectionConfig
from coneflex.discrete_cone import eval_D1 as cone_D1, eval_D2 as cone_D2
from coneflex.discrete_cylinder import (CylinderConfig, build_prism_strip, eval_D1, eval_D2, eval_E_cyl,
                                        eval_R, exclusions, fold_coupling_cyl, solve_R_for_ti,
                                        synthesize_cylinder)
from coneflex.poly_elim import classify_special_factor, eliminate_d1

SEED = (F(1, 2), F(2, 3), F(3, 2), F(2, 5))


@pytest.fixture(scope="module")
def cyl():
    return synthesize_cylinder(*SEED)


def test_eval_R_trivial_cancellation():
    rng = np.random.default_rng(20)
    for _ in range(50):
        s1, si = rng.uniform(-3, 3, 2)
        assert abs(eval_R(2, s1, si, s1, si)) < 1e-12
    assert eval_R(3, F(2, 7), F(-5, 3), F(2, 7), F(-5, 3)) == 0


def test_eval_R_generic_nonzero():
    rng = np.random.default_rng(21)
    vals = [abs(eval_R(2, *rng.uniform(-3, 3, 4))) for _ in range(100)]
    assert min(vals) > 0


def test_affine_example():
    roots = solve_R_for_ti(2, 1.0, 2.0, 3.0)
    assert roots
    for t in roots:
        assert abs(eval_R(2, 1.0, 2.0, 3.0, t)) < 1e-12


def test_back_substitution_and_real_roots():
    rng = np.random.default_rng(22)
    for _ in range(1000):
        s1, si, t1 = rng.uniform(-3, 3, 3)
        roots = solve_R_for_ti(3, s1, si, t1)
        assert len(roots) == 2
        assert abs(roots[0] * roots[1] + 1) < 1e-9
        for t in roots:
            scale = max(1.0, abs(t)) ** 2 * max(1.0, abs(s1 * si * t1)) ** 2
            assert abs(eval_R(3, s1, si, t1, t)) < 1e-12 * scale


def test_identical_planes_root():
    for s1, si in [(0.3, 1.7), (-2.0, 0.4)]:
        roots = solve_R_for_ti(2, s1, si, s1)
        assert min(abs(r - si) for r in roots) < 1e-12


def test_four_root_combinations_are_flexible():
    for r2 in (0, 1):
        for r3 in (0, 1):
            cfg = synthesize_cylinder(*SEED, t2_root=r2, t3_root=r3)
            assert cfg.is_exact()
            assert eval_E_cyl(cfg) == (0, 0)
            for d2 in (0.2, -0.35):
                for d1 in fold_coupling_cyl(cfg, d2):
                    assert abs(eval_D2(cfg.to_float(), FoldPair(d1, d2))) < 1e-10


def test_m_zero_consistency(cyl):
    cf = cyl.to_float()
    sc = SectionConfig(0.0, cf.s1, cf.s2, cf.s3, cf.t1, cf.t2, cf.t3)
    for d in [(0.3, 0.7), (-1.2, 0.1)]:
        f = FoldPair(*d)
        assert abs(eval_D1(cf, f) - cone_D1(sc, f)) < 1e-14
        assert abs(eval_D2(cf, f) - cone_D2(sc, f)) < 1e-14


def test_resultant_degree_drop():
    rng = np.random.default_rng(23)
    for _ in range(20):
        vals = [F(int(rng.integers(1, 9)) * int(rng.choice([-1, 1])), int(rng.integers(1, 6)))
                for _ in range(6)]
        cfg = CylinderConfig(*vals)
        if exclusions(cfg) or classify_special_factor(cfg.section()):
            continue
        E2, E0 = eval_E_cyl(cfg)      # exact division; StructureError otherwise
        r = eliminate_d1(cfg.section())
        assert r.degree <= 6
        assert (E2, E0) != (0, 0)


def test_fold_coupling_flat_state(cyl):
    assert 0.0 in [round(d, 15) for d in fold_coupling_cyl(cyl, 0.0)]


def test_containment_property(cyl):
    rng = np.random.default_rng(24)
    cf = cyl.to_float()
    hits = 0
    for d2 in rng.uniform(-1, 1, 100):
        for d1 in fold_coupling_cyl(cyl, d2):
            assert abs(eval_D1(cf, FoldPair(d1, d2))) < 1e-10
            assert abs(eval_D2(cf, FoldPair(d1, d2))) < 1e-10
            hits += 1
    assert hits >= 100


def test_non_synthesized_negative_control(cyl):
    cf = cyl.to_float()
    bad = CylinderConfig(cf.s1, cf.s2, cf.s3, cf.t1, cf.t2 * 1.3, cf.t3, cf.spacing)
    worst = []
    for d2 in (0.3, 0.5, -0.4):
        for d1 in fold_coupling_cyl(bad, d2):
            worst.append(abs(eval_D2(bad, FoldPair(d1, d2))))
    assert min(worst) > 1e-3


def test_parallel_faces_rejected():
    labels = exclusions(CylinderConfig(0.5, 0.7, 0.5, 1.2, 0.3, -0.4))
    assert any("parallel" in l for l in labels)
    labels = exclusions(CylinderConfig(0.5, 0.7, 2.0, 1.2, 0.3, -0.4))
    assert any("s₁s₃−1" in l for l in labels)
    assert exclusions(CylinderConfig(0.5, 0.7, 1.5, 1.2, 0.3, -0.4)) == []


def test_flat_base_strip_is_planar(cyl):
    s = build_prism_strip(cyl, 3, 0.0)
    from coneflex.geometry import fit_plane
    assert fit_plane(np.vstack([s.a_points, s.b_points]))[1] < 1e-14


@pytest.mark.parametrize("normalized", [False, True])
def test_prism_motion(cyl, normalized):
    ref = None
    for d2 in np.linspace(-0.6, 0.6, 20):
        s = build_prism_strip(cyl, 9, d2, normalized=normalized)
        r = s.residuals()
        assert r["alpha_planarity"] < 1e-9 and r["beta_planarity"] < 1e-9
        assert r["isometry"] < 1e-10
        el = np.linalg.norm(np.diff(s.a_points, axis=0), axis=1)
        ref = el if ref is None else ref
        assert np.max(np.abs(el - ref)) < 1e-10
        assert s.mesh().face_planarity() < 1e-9
    if normalized:
        assert np.allclose(s.tau[1:], math.pi / 2)


def test_prism_motion_limit(cyl):
    with pytest.raises(InfeasibleError, match="motion limit"):
        build_prism_strip(cyl, 6, 5.0)


def test_spacing_does_not_affect_conditions(cyl):
    from dataclasses import replace
    a = build_prism_strip(cyl, 6, 0.4).residuals()
    b = build_prism_strip(replace(cyl.to_float(), spacing=2.5), 6, 0.4).residuals()
    assert b["alpha_planarity"] < 1e-9 and b["beta_planarity"] < 1e-9
    assert abs(a["D2"] - b["D2"]) < 1e-12
