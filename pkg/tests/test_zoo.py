import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lyapnum import zoo
from lyapnum.estimators import EstimatorConfig, estimate_all
from lyapnum.metric_core import n_rows, take
import oracles


def test_three_branch_values():
    g = zoo.three_branch_map
    assert g(np.array([1 / 3]))[0] == pytest.approx(1.0, abs=1e-15)
    assert g(np.array([0.5]))[0] == 0.5
    assert g(np.array([0.0]))[0] == 0.0


@settings(max_examples=200, deadline=None)
@given(st.fractions(0, 1, max_denominator=10 ** 6))
def test_three_branch_matches_closed_form(x):
    assert zoo.three_branch_map(np.array([float(x)]))[0] == pytest.approx(float(oracles.three_branch_exact(x)),
                                                                          abs=1e-12)


def test_surface_embedding_and_step():
    spec = zoo.make_surface_prop51()
    assert zoo.surface_embed(np.array([[0.5, 0.0]]))[0].tolist() == [0.5, 0.0, 2.0]
    after = spec.system.map_eval(np.array([[0.5, math.pi / 3]]))[0]
    assert after[0] == 0.75
    assert after[1] == pytest.approx(2 * math.pi / 3, abs=1e-15)
    assert zoo.surface_height(after[0]) == 1.5


def test_surface_origin_to_outer_circle():
    sys = zoo.make_surface_prop51().system
    origin = sys.point([0.0, 0.0])
    phis = np.linspace(0, 2 * math.pi, 50, endpoint=False)
    ring = np.stack([np.ones_like(phis), phis], axis=1)
    assert np.allclose(sys.metric(origin, ring), 1.0, atol=1e-15)


def test_surface_radial_identity_and_bound():
    r = np.linspace(0.0, 1.0, 10 ** 4)
    assert np.max(np.abs((1.0 - zoo.surface_radial(r)) - (1.0 - r) ** 2)) <= 1e-15
    r0 = np.array([0.01, 0.2, 0.7])
    rn = r0.copy()
    for n in range(1, 6):
        prev = rn
        rn = zoo.surface_radial(rn)
        assert np.all(rn >= prev)
        assert np.all(1.0 - rn <= (1.0 - r0) ** (2 ** n) + 1e-15)


def test_surface_angle_stays_reduced():
    sys = zoo.make_surface_prop51().system
    p = np.array([[0.3, 6.2], [0.9, 3.2]])
    for _ in range(100):
        p = sys.map_eval(p)
        assert np.all((p[:, 1] >= 0) & (p[:, 1] < 2 * math.pi))


def test_tent_and_doubling_formulas():
    tent = zoo.make_tent(horizon=16).system
    assert tent.coords(tent.map_eval(tent.point(0.25)))[0, 0] == 0.5
    circ = zoo.make_doubling_circle(horizon=16).system
    assert circ.metric(circ.point(0.1), circ.point(0.9))[0] == pytest.approx(0.2, abs=1e-15)


def test_rotation_isometry_and_validation():
    rot = zoo.make_rotation(0.381966).system
    delta = 1e-3
    x, y = rot.point(0.0), rot.point(delta)
    for _ in range(500):
        x, y = rot.map_eval(x), rot.map_eval(y)
        assert rot.metric(x, y)[0] <= delta + 1e-12
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            zoo.make_rotation(bad)


def test_product_metric_and_diameter():
    prod = zoo.make_product(zoo.make_tent(32), zoo.make_tent(32)).system
    p = prod.point((0.0, 0.0))
    q = prod.point((1.0, 0.3))
    # 1 is stored as 0.111... with a 53-digit head, one unit in the last place below 1
    assert prod.metric(p, q)[0] == pytest.approx(1.0, abs=2.0 ** -52)
    dd = zoo.make_product(zoo.make_doubling_circle(32), zoo.make_doubling_circle(32)).system
    assert dd.known_diameter == 0.5


def test_product_flags():
    tt = zoo.make_product(zoo.make_tent(32), zoo.make_tent(32))
    assert tt.flags == {"transitive": True, "minimal": None, "weakly_mixing": True, "sensitive": True}
    rr = zoo.make_product(zoo.make_rotation(0.3), zoo.make_rotation(0.4))
    assert set(rr.flags.values()) == {None}


def test_product_of_rotations_is_null():
    spec = zoo.make_product(zoo.make_rotation(0.381966), zoo.make_rotation(0.2))
    cfg = EstimatorConfig.preset("smoke")
    rep = estimate_all(spec, cfg)
    assert max(rep.values) <= 2 * cfg.deltas[-1]


def test_full_shift_metric_and_step():
    spec = zoo.make_full_shift(2, horizon=8)
    sys = spec.system
    W = spec.params["word_length"]
    a = np.zeros(W, dtype=np.uint8)
    a[1:] = 1
    b = np.zeros(W, dtype=np.uint8)
    b[0] = 1
    assert sys.metric(sys.point(a), sys.point(b))[0] == 1.0
    assert sys.metric(sys.point(a), sys.point(a))[0] == 0.0
    c = a.copy()
    c[70] ^= 1
    assert sys.metric(sys.point(a), sys.point(c))[0] == 2.0 ** -70
    word = np.zeros(W, dtype=np.uint8)
    word[1:3] = 1  # 0110...
    shifted = sys.coords(sys.map_eval(sys.point(word)))[0]
    assert shifted[:3].tolist() == [1, 1, 0]
    assert shifted[:W - 1].tolist() == word[1:].tolist()


def test_full_shift_rejections():
    with pytest.raises(ValueError):
        zoo.make_full_shift(1)
    with pytest.raises(ValueError):
        zoo.make_full_shift(2, word_length=100, horizon=90, margin=64)
    sys = zoo.make_full_shift(2, horizon=20).system
    assert sys.max_horizon == 20


def test_full_shift_metric_matches_reference():
    sys = zoo.make_full_shift(3, horizon=40).system
    rng = np.random.default_rng(5)
    pts = sys.uniform_sampler(rng, 30)
    words = sys.coords(pts)
    # force long common prefixes to reach the tail part
    words[1::2, :50] = words[0::2, :50]
    pts = sys.point(words)
    got = sys.metric(take(pts, np.arange(0, 30, 2)), take(pts, np.arange(1, 30, 2)))
    ref = [float(oracles.shift_metric(words[i], words[i + 1])) for i in range(0, 30, 2)]
    assert got.tolist() == ref


@pytest.mark.parametrize("name", list(zoo.DEFAULT_REGISTRY))
def test_hard_points_lie_in_space(name):
    spec = zoo.resolve(name, horizon=64)
    sys = spec.system
    sys.check_points(spec.hard_points)
    assert np.all(sys.metric(spec.hard_points, spec.hard_points) == 0)


def test_fixed_hard_points_are_fixed():
    br = zoo.make_three_branch().system
    assert abs(br.map_eval(br.point(0.5))[0, 0] - 0.5) < 1e-12
    tent = zoo.make_tent(64).system
    for x in (0, Fraction(2, 3)):
        p = tent.point(x)
        assert tent.metric(tent.map_eval(p), p)[0] < 1e-12
    surf = zoo.make_surface_prop51().system
    pts = np.array([[0.0, 0.0], [1.0, 2.0]])
    assert np.array_equal(surf.map_eval(pts)[:, 0], pts[:, 0])


def test_registry_names_and_filter():
    names = [s.name for s in zoo.registry()]
    for expected in ("three_branch", "surface_prop51", "tent", "doubling", "full_shift:2"):
        assert expected in names
    assert zoo.registry("no-such-system") == []
    assert [s.name for s in zoo.registry("rotation")] == ["rotation:0.381966"]


@pytest.mark.parametrize("bad", ["nope", "rotation", "tent:3", "full_shift:x", "product:tent"])
def test_resolve_errors(bad):
    with pytest.raises(ValueError):
        zoo.resolve(bad)


def test_resolve_parameters():
    assert zoo.resolve("full_shift:3").params["k"] == 3
    assert zoo.resolve("rotation:0.25").params["alpha"] == 0.25
    assert zoo.resolve("product:doubling,tent").system.known_diameter == 1.0


def test_scaled_spec():
    spec = zoo.make_scaled(zoo.make_three_branch(), 2.0)
    assert spec.system.known_diameter == 2.0
    assert spec.system.length_unit == 2.0
    assert n_rows(spec.hard_points) == 5
