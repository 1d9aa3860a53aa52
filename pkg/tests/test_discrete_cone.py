import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coneflex.discrete_cone import (ALL_SELECTORS, BranchSelector, FoldPair, InfeasibleError, SectionConfig,
                                    _side_discriminant, detect_coupling, eval_D1, eval_D2, eval_MN, eval_S,
                                    eval_T, face_normals, flat_states, fold_coupling, quadratic_roots,
                                    solve_MN_for_t3, solve_S_for_s2, solve_T_for_t2, synthesize_config,
                                    validate_exclusions)
from coneflex.exact import QuadField
from coneflex.poly_elim import coeffs_D, denominator, eval_E, eval_table

from conftest import SEED_FREE, random_free, synth_many

R2 = math.sqrt(2)
M11 = BranchSelector(1, 1, "M")
N11 = BranchSelector(1, 1, "N")
coord = st.floats(-4, 4, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


def generic():
    return SectionConfig(0.4, 0.7, -1.3, 2.2, -0.6, 1.9, 0.35)


# ------------------------------------------------------------ determinants

def test_flat_fold_is_coplanar():
    rng = np.random.default_rng(3)
    for _ in range(20):
        cfg = SectionConfig(*rng.uniform(-3, 3, 7))
        assert eval_D1(cfg, FoldPair(0.0, 0.0)) == pytest.approx(0, abs=1e-15)
        assert eval_D2(cfg, FoldPair(0.0, 0.0)) == pytest.approx(0, abs=1e-15)


def test_quadratic_roots_of_D1_zero_it():
    rng = np.random.default_rng(4)
    for _ in range(50):
        cfg = SectionConfig(*rng.uniform(-2, 2, 7))
        d2 = rng.uniform(-2, 2)
        p = coeffs_D("D1", cfg, exact=False)
        a, b, c = (float(p.coeff(i)(d2)) for i in (2, 1, 0))
        for d1 in quadratic_roots(a, b, c):
            assert abs(eval_D1(cfg, FoldPair(d1, d2))) < 1e-12


def test_determinants_agree_with_table():
    cfg = generic()
    for d1, d2 in [(0.3, -0.8), (2.0, 1.1), (-5.0, 0.05)]:
        for which, f in (("D1", eval_D1), ("D2", eval_D2)):
            tab = eval_table(coeffs_D(which, cfg), d1, d2) / denominator(which, cfg, d1, d2)
            assert abs(tab - f(cfg, FoldPair(d1, d2))) < 1e-12


@given(coord, coord, st.floats(0.1, 10))
def test_scaling_directions_keeps_zero_set(d1, d2, lam):
    # scaling one edge vector scales the determinant; zero set unchanged
    from coneflex.discrete_cone import edge_directions
    from coneflex.geometry import det3
    a1, a2, a3 = edge_directions(generic(), FoldPair(d1, d2), "s")
    base = det3(a1, a2, a3)
    assert det3(lam * a1, a2, a3) == pytest.approx(lam * base, rel=1e-12, abs=1e-14)


# ------------------------------------------------------------ branch factors

def test_eval_T_examples():
    cfg = SectionConfig(1, 9, 9, 9, 1, R2 - 1, 1)
    assert abs(eval_T(2, cfg)) < 1e-14
    assert eval_T(1, cfg) == pytest.approx(8 * R2 - 8, abs=1e-13)


def test_eval_T_exact_in_field():
    K = QuadField([2])
    cfg = SectionConfig(1, 9, 9, 9, 1, K.sqrt(2) - 1, 1)
    assert eval_T(2, cfg) == 0
    assert eval_T(1, cfg) == 8 * K.sqrt(2) - 8


def test_s_side_mirror():
    cfg = SectionConfig(1, 1, R2 - 1, 1, 5, 5, 5)
    assert abs(eval_S(2, cfg)) < 1e-14


@given(st.lists(coord, min_size=7, max_size=7))
def test_swap_maps_S_to_T(vals):
    cfg = SectionConfig(*vals)
    for u in (1, 2):
        assert eval_S(u, cfg) == eval_T(u, cfg.swap())


def test_eval_MN_examples():
    assert eval_MN(M11, F(2, 3), F(5, 7), F(2, 3), F(5, 7)) == 0
    assert eval_MN(M11, 1, 1, 1, 1) == 0
    assert eval_MN(N11, 1, F(-1, 2), 1, 2) == -5


# ------------------------------------------------------------ solvers

def test_solve_T_example():
    roots = solve_T_for_t2(2, 1.0, 1.0, 1.0)
    assert any(abs(r - (R2 - 1)) < 1e-14 for r in roots)
    exact = solve_T_for_t2(2, F(1), F(1), F(1))
    assert QuadField([2]).sqrt(2) - 1 in exact


def test_branch_quadratic_never_has_complex_roots():
    # the t2-quadratic has c = -a, so its discriminant b^2 + 4a^2 is >= 0
    rng = np.random.default_rng(5)
    for _ in range(2000):
        m, w1, w3 = rng.uniform(-10, 10, 3)
        for u in (1, 2):
            assert _side_discriminant(u, m, w1, w3) >= 0


def test_quadratic_roots_empty_on_negative_discriminant():
    assert quadratic_roots(1.0, 0.0, 1.0) == []
    assert quadratic_roots(F(1), F(1), F(1)) == []


def test_root_back_substitution():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        m, w1, w3 = rng.uniform(-3, 3, 3)
        v = int(rng.integers(1, 3))
        for t2 in solve_T_for_t2(v, m, w1, w3):
            scale = max(1.0, abs(t2)) ** 2 * max(1.0, abs(m) * abs(w1)) * (1 + w3 * w3) * 10
            assert abs(eval_T(v, SectionConfig(m, 0, 0, 0, w1, t2, w3))) < 1e-12 * scale
        for s2 in solve_S_for_s2(v, m, w1, w3):
            scale = max(1.0, abs(s2)) ** 2 * max(1.0, abs(m) * abs(w1)) * (1 + w3 * w3) * 10
            assert abs(eval_S(v, SectionConfig(m, w1, s2, w3, 0, 0, 0))) < 1e-12 * scale


def test_solve_MN_examples():
    assert solve_MN_for_t3(M11, F(1), F(1), F(1)) == 1
    assert solve_MN_for_t3(M11, F(3, 2), F(-7, 5), F(3, 2)) == F(-7, 5)
    rng = np.random.default_rng(7)
    for _ in range(200):
        s1, s3, t1 = rng.uniform(-3, 3, 3)
        sel = ALL_SELECTORS[int(rng.integers(0, 8))]
        t3 = solve_MN_for_t3(sel, s1, s3, t1)
        assert abs(eval_MN(sel, s1, s3, t1, t3)) < 1e-14 * max(1.0, abs(t3)) * 50


# ------------------------------------------------------------ synthesis

@pytest.mark.parametrize("sel", ALL_SELECTORS, ids=str)
def test_synthesized_example_has_zero_E(sel):
    try:
        cfg = synthesize_config(sel, F(1, 2), F(2), F(1, 3), F(3))
    except InfeasibleError as e:
        pytest.skip("branch rejected: %s" % e)
    assert cfg.is_exact()
    assert eval_E(cfg) == (0, 0, 0)


def test_most_selectors_accept_the_example_seed():
    ok = 0
    for sel in ALL_SELECTORS:
        try:
            synthesize_config(sel, F(1, 2), F(2), F(1, 3), F(3))
            ok += 1
        except InfeasibleError:
            pass
    assert ok >= 6


def test_parallel_seed_rejected():
    with pytest.raises(InfeasibleError, match="trivial parallel solution"):
        synthesize_config(M11, F(1, 2), F(2), F(1, 3), F(2))


def test_random_seeds_all_satisfy_condition():
    rng = np.random.default_rng(8)
    got = synth_many(150, rng)
    assert len(got) >= 100
    for sel, cfg in got:
        assert eval_E(cfg) == (0, 0, 0), (sel, cfg)


def test_s3_freedom():
    t_side = synthesize_config(M11, *SEED_FREE)
    good = 0
    for s3 in [F(k, 7) for k in range(-9, 12, 2)]:
        try:
            cfg = synthesize_config(M11, SEED_FREE[0], SEED_FREE[1], s3, SEED_FREE[3])
        except InfeasibleError:
            continue
        assert eval_E(cfg) == (0, 0, 0)
        good += 1
    assert good >= 8 and t_side.t1 == SEED_FREE[3]


def test_generic_config_is_not_flexible():
    assert any(e != 0 for e in eval_E(SectionConfig(F(1, 2), F(2), F(3), F(1, 3), F(3), F(5), F(-2))))


# ------------------------------------------------------------ coupling

def _both(cfg, d1, d2):
    return abs(eval_D1(cfg, FoldPair(d1, d2))), abs(eval_D2(cfg, FoldPair(d1, d2)))


def test_coupled_motion_zeroes_both_determinants():
    rng = np.random.default_rng(9)
    for sel, cfg in synth_many(16, rng, exact=False):
        cfg = cfg.to_float()
        for d1 in rng.uniform(-3, 3, 100):
            d2 = fold_coupling(cfg, sel, d1)
            r1, r2 = _both(cfg, d1, d2)
            assert max(r1, r2) < 1e-10


def test_coupling_graph_dense_sampling():
    sel, cfg = N11, synthesize_config(N11, *SEED_FREE).to_float()
    for d1 in np.linspace(-8, 8, 1000):
        assert max(_both(cfg, d1, fold_coupling(cfg, sel, d1))) < 1e-10


def test_p_type_passes_through_flat_state(n_config):
    sel, cfg = n_config
    assert detect_coupling(cfg, sel).kind == "P"
    assert fold_coupling(cfg, sel, 0.0) == 0.0


def test_q_type_has_constant_product(m_config):
    sel, cfg = m_config
    c = detect_coupling(cfg, sel)
    assert c.kind == "Q"
    prods = [d1 * fold_coupling(cfg, sel, d1) for d1 in np.linspace(0.1, 5, 40)]
    assert np.ptp(prods) < 1e-12 * max(1.0, abs(prods[0]))


def test_delta2_continuous_through_pi(m_config):
    sel, cfg = m_config
    c = detect_coupling(cfg, sel)
    ds = np.linspace(-3, 3, 601)
    vals = np.unwrap([c.delta2(d) for d in ds])
    assert np.max(np.abs(np.diff(vals))) < 0.2


@pytest.mark.parametrize("which", ["N", "M"])
def test_flat_states(which, n_config, m_config):
    sel, cfg = n_config if which == "N" else m_config
    states = flat_states(cfg, sel)
    assert len(states) == 2
    c = detect_coupling(cfg, sel)
    if c.kind == "P":
        assert (states[0].d1, states[0].d2, states[0].inf1, states[0].inf2) == (0, 0, False, False)
    for st_ in states:
        assert c.residual(st_) < 1e-12
        assert max(_both(cfg.to_float(), 0, 0)) < 1e-12
        n1, n2, n3 = face_normals(cfg, st_)
        assert np.linalg.norm(np.cross(n1, n2)) < 1e-10
        assert np.linalg.norm(np.cross(n2, n3)) < 1e-10


def test_mismatched_branch_is_rejected(n_config):
    sel, cfg = n_config
    with pytest.raises(InfeasibleError, match="branch mismatch"):
        detect_coupling(cfg.to_float().__class__(*[1.1 * x for x in cfg.to_float().as_tuple()]), sel)


# ------------------------------------------------------------ exclusions

def test_exclusion_examples():
    cfg = generic()
    assert validate_exclusions(cfg) == []
    bad = SectionConfig(0.4, 0.7, 0.4, 2.2, -0.6, 1.9, 0.35)
    assert "A₂ along r₂" in validate_exclusions(bad)
    bad = SectionConfig(0.4, 0.7, -1.3, 2.2, 1.9, 1.9, 0.35)
    assert any("δ₁=0 coincidence" in v for v in validate_exclusions(bad))
    assert any("μ=0" in v for v in validate_exclusions(SectionConfig(0, 1, 2, 3, 4, 5, 6)))
