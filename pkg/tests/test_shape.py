"""Shape calculus: the variational evaluator, hull construction, empirical
shapes and the pyramid gadget."""

import math

import numpy as np
import pytest

from fppkit.dist import FiniteAtoms, PointMass
from fppkit.env import HalfPlane, HalfPlaneAxis, Homogeneous, OverrideField, WeightField, edge
from fppkit.shape import (
    GadgetSpec,
    InvalidGadget,
    Polygon,
    SeminormEval,
    UnboundedShape,
    axis_block_path,
    block_occurs,
    constructed_path_cost,
    convex_hull,
    empirical_shape,
    gadget_block_path,
    gadget_bound,
    gadget_dist,
    gadget_env,
    hausdorff,
    hull_shape,
    mubar_eval,
    polygon_csv_rows,
    polygon_svg,
    pyramid_test,
    seminorm_half_shape,
    sublevel_polygon,
)

L1 = SeminormEval.scaled_l1(1.0)
DIAMOND = Polygon.from_points([(1, 0), (0, 1), (-1, 0), (0, -1)])
LEFT_HALF_DIAMOND = Polygon.from_points([(0, 1), (-1, 0), (0, -1), (0, 0)])
RIGHT_HALF_DIAMOND = Polygon.from_points([(0, 1), (1, 0), (0, -1), (0, 0)])


def test_seminorm_eval_exact_and_interpolated():
    assert L1((3, -4)) == 7.0
    assert L1((0, 0)) == 0.0
    s = SeminormEval.from_directional_estimates(
        [((1, 0), 2.0), ((0, 1), 1.0), ((-1, 0), 2.0), ((0, -1), 1.0)])
    assert s((0, 3)) == pytest.approx(3.0)
    assert s((2, 0)) == pytest.approx(4.0)
    assert s((1, 1)) == pytest.approx(s((-1, -1)))  # central symmetry
    assert s.interpolation_gap() == pytest.approx(math.pi / 2)
    assert L1.interpolation_gap() == 0.0


def test_mubar_axis_scaling():
    for lam in [-3.5, -1, 0.25, 2]:
        assert mubar_eval(L1, L1, 0.7, (0, lam)) == pytest.approx(0.7 * abs(lam), abs=1e-9)


def test_mubar_zero_side():
    zero = SeminormEval.scaled_l1(0.0)
    assert mubar_eval(L1, zero, 0.5, (2, 3)) == 0.0
    assert mubar_eval(L1, zero, 0.0, (2, 3)) == 0.0
    # nu = 0 with a live side degenerates to the horizontal reach
    assert mubar_eval(L1, L1, 0.0, (2.0, 5.0)) == pytest.approx(2.0, abs=1e-9)


def test_mubar_no_pyramid_case_with_grid_oracle():
    # nu equals the side's axis value: minimizer a = 0
    val = mubar_eval(L1, L1, 1.0, (1, 0))
    assert val == pytest.approx(1.0, abs=1e-9)
    grid = np.linspace(-10, 10, 20001)
    oracle = (np.abs(grid) * 1.0 + np.abs(1.0) + np.abs(0.0 - grid)).min()
    assert val == pytest.approx(float(oracle), abs=1e-6)
    with pytest.raises(ValueError):
        mubar_eval(L1, L1, -0.1, (1, 0))


def test_mubar_pyramid_case_with_grid_oracle():
    nu = 0.9
    pts = [(1.0, 2.0), (0.5, -3.0), (-2.0, 1.0), (4.0, 0.0)]
    grid = np.linspace(-40, 40, 80001)
    for x in pts:
        val = mubar_eval(L1, L1, nu, x)
        oracle = (np.abs(grid) * nu + np.abs(x[0]) + np.abs(x[1] - grid)).min()
        assert val <= float(oracle) + 1e-9
        assert val == pytest.approx(float(oracle), abs=1e-3)


def test_mubar_seminorm_properties():
    rng = np.random.default_rng(31)
    s_minus = SeminormEval.scaled_l1(1.2)
    s_plus = SeminormEval.scaled_l1(0.8)
    nu = 0.6  # strictly below both axis values: a genuine pyramid

    def f(x):
        return mubar_eval(s_minus, s_plus, nu, x)

    for _ in range(100):
        x = tuple(rng.uniform(-5, 5, size=2))
        lam = float(rng.uniform(0, 3))
        assert abs(f((lam * x[0], lam * x[1])) - lam * f(x)) <= 1e-8
    for _ in range(200):
        x = tuple(rng.uniform(-5, 5, size=2))
        y = tuple(rng.uniform(-5, 5, size=2))
        assert f((x[0] + y[0], x[1] + y[1])) <= f(x) + f(y) + 1e-7
        lip = max(s_minus((0, 1)), s_plus((0, 1)))
        assert abs(f(x) - f(y)) <= lip * (abs(x[0] - y[0]) + abs(x[1] - y[1])) + 1e-7
    # dominated by the side seminorms on their half-planes
    for _ in range(50):
        x = (float(rng.uniform(0, 5)), float(rng.uniform(-5, 5)))
        assert f(x) <= s_plus(x) + 1e-9
        xm = (-x[0], x[1])
        assert f(xm) <= s_minus(xm) + 1e-9


def test_convex_hull_basics():
    hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0.0)])
    assert hull == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    assert Polygon.from_points(hull).is_convex()


def test_hull_shape_homogeneous_diamond():
    got = hull_shape(LEFT_HALF_DIAMOND, RIGHT_HALF_DIAMOND, 1.0)
    assert hausdorff(got, DIAMOND) < 1e-12
    # dominant nu: the segment is absorbed
    got = hull_shape(LEFT_HALF_DIAMOND, RIGHT_HALF_DIAMOND, 2.0)
    assert hausdorff(got, DIAMOND) < 1e-12


def test_hull_shape_pyramid_vertices():
    nu = 0.9744
    got = hull_shape(LEFT_HALF_DIAMOND, RIGHT_HALF_DIAMOND, nu)
    want = {(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0 / nu), (0.0, -1.0 / nu)}
    assert {(round(x, 9), round(y, 9)) for x, y in got.vertices} == \
        {(round(x, 9), round(y, 9)) for x, y in want}
    assert got.contains_origin()


def test_hull_shape_contains_inputs_and_segment():
    angles = np.linspace(0, 2 * math.pi, 360, endpoint=False)
    for nu in (0.5, 0.9744, 3.0):
        hull = hull_shape(LEFT_HALF_DIAMOND, RIGHT_HALF_DIAMOND, nu)
        assert (hull.support(angles) >= LEFT_HALF_DIAMOND.support(angles) - 1e-12).all()
        assert (hull.support(angles) >= RIGHT_HALF_DIAMOND.support(angles) - 1e-12).all()
        seg = Polygon(((0.0, -1.0 / nu), (0.0, 1.0 / nu)))
        assert (hull.support(angles) >= seg.support(angles) - 1e-12).all()


def test_hull_shape_rejects_bad_inputs():
    with pytest.raises(ValueError):
        hull_shape(RIGHT_HALF_DIAMOND, RIGHT_HALF_DIAMOND, 1.0)  # misplaced
    with pytest.raises(ValueError):
        hull_shape(LEFT_HALF_DIAMOND, RIGHT_HALF_DIAMOND, 0.0)
    bent = Polygon(((0.0, 0.0), (1.0, 0.0), (0.2, 0.2), (0.0, 1.0)))
    with pytest.raises(ValueError):
        hull_shape(LEFT_HALF_DIAMOND, bent, 1.0)


def test_hausdorff_contract():
    assert hausdorff(DIAMOND, DIAMOND) == 0.0
    sq1 = Polygon.from_points([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    sq2 = Polygon.from_points([(-2, -2), (2, -2), (2, 2), (-2, 2)])
    d = hausdorff(sq1, sq2)
    assert d >= 0.99
    assert d == pytest.approx(math.sqrt(2), abs=1e-9)  # 720 samples hit pi/4
    assert hausdorff(sq2, sq1) == d


def test_sublevel_matches_hull_formula():
    cases = [
        (1.0, 1.0, 1.0),      # homogeneous, segment on the boundary
        (1.2, 0.8, 0.8),      # sides differ, no pyramid
        (1.0, 1.0, 0.9744),   # pyramid
    ]
    for cm, cp, nu in cases:
        s_minus, s_plus = SeminormEval.scaled_l1(cm), SeminormEval.scaled_l1(cp)
        level = sublevel_polygon(s_minus, s_plus, nu)
        hull = hull_shape(seminorm_half_shape(s_minus, "left"),
                          seminorm_half_shape(s_plus, "right"), nu)
        assert hausdorff(level, hull) < 1e-3


def test_empirical_shape_unit_weights():
    shape = empirical_shape(Homogeneous(PointMass(1.0)), 40.0, seed=1)
    assert hausdorff(shape, DIAMOND) < 0.05


def test_empirical_shape_deterministic_mixed_halves_converges():
    # weights 1 on the left, 0.5 on the right and on the axis: the limit shape
    # is conv{(-1,0), (2,0), (0,2), (0,-2)}
    spec = HalfPlane(PointMass(1.0), PointMass(0.5))
    predicted = hull_shape(
        Polygon.from_points([(-1, 0), (0, 2), (0, -2), (0, 0)]),
        Polygon.from_points([(2, 0), (0, 2), (0, -2), (0, 0)]),
        0.5)
    d20 = hausdorff(empirical_shape(spec, 20.0, seed=3), predicted)
    d40 = hausdorff(empirical_shape(spec, 40.0, seed=3), predicted)
    assert d40 <= d20 + 1e-9
    assert d40 < 0.1


def test_empirical_shape_rejects_unbounded():
    heavy_zero = FiniteAtoms(((0.0, 0.6), (1.0, 0.4)))
    with pytest.raises(UnboundedShape):
        empirical_shape(HalfPlane(PointMass(1.0), heavy_zero), 10.0, seed=0)


def test_gadget_bound_arithmetic():
    g = GadgetSpec(y=0.2, p=0.4, K=1, z_high=4.0)
    assert gadget_bound(g) == pytest.approx(0.9744, abs=1e-12)
    g2 = GadgetSpec(y=0.5, p=0.5, K=3, z_high=2.0)
    assert gadget_bound(g2) == pytest.approx(1.0 - 0.03125 * 0.5 / 3.0, abs=1e-12)
    assert gadget_bound(g2) == pytest.approx(0.994791666666, abs=1e-9)
    # vanishing occurrence probability: no gain
    assert gadget_bound(GadgetSpec(y=0.2, p=1e-9, K=1, z_high=4.0)) == pytest.approx(1.0)
    rng = np.random.default_rng(2)
    for _ in range(100):
        y = float(rng.uniform(0.01, 0.9))
        k = int(rng.integers(1, 9))
        if (k + 2) * y >= k:
            continue
        g = GadgetSpec(y=y, p=float(rng.uniform(0.01, 0.99)), K=k, z_high=2.0)
        assert gadget_bound(g) < 1.0


def test_gadget_spec_validation():
    with pytest.raises(InvalidGadget):
        GadgetSpec(y=0.5, p=0.5, K=1, z_high=4.0)   # (K+2) y = 1.5 >= 1
    with pytest.raises(InvalidGadget):
        GadgetSpec(y=0.2, p=0.0, K=1, z_high=4.0)   # degenerate p
    with pytest.raises(InvalidGadget):
        GadgetSpec(y=0.2, p=0.4, K=0, z_high=4.0)


def test_gadget_env_regions():
    g = GadgetSpec(y=0.2, p=0.4, K=1, z_high=4.0)
    spec = gadget_env(g)
    field = WeightField(spec, 0)
    assert field.region_of(edge((-1, 0), (0, 0))) == gadget_dist(g)
    assert field.region_of(edge((0, 3), (0, 4))) == PointMass(1.0)
    mirrored = gadget_env(g, mirror=True)
    assert isinstance(mirrored, HalfPlaneAxis)
    fm = WeightField(mirrored, 0)
    assert fm.region_of(edge((0, 0), (1, 0))) == gadget_dist(g)
    assert fm.region_of(edge((0, 3), (0, 4))) == PointMass(1.0)


def test_gadget_block_geometry():
    g = GadgetSpec(y=0.2, p=0.4, K=3, z_high=4.0)
    path = gadget_block_path(g, 2)
    assert path[0] == (0, 6) and path[-1] == (0, 9)
    assert len(path) == g.K + 3  # K+2 edges
    axis = axis_block_path(g, 2)
    assert len(axis) == g.K + 1


def test_constructed_path_cost_identity():
    g = GadgetSpec(y=0.2, p=0.4, K=1, z_high=4.0)
    field = WeightField(gadget_env(g), 12)
    blocks = 200
    cost, n_occ = constructed_path_cost(field, g, blocks)
    want = g.K * (blocks - n_occ) + (g.K + 2) * n_occ * g.y
    assert cost == pytest.approx(want, abs=1e-9)
    assert 0 < n_occ < blocks  # p^3 = 6.4% of blocks, 200 draws


def test_constructed_path_cost_with_forced_uniforms():
    g = GadgetSpec(y=0.2, p=0.4, K=2, z_high=4.0)
    base = WeightField(gadget_env(g), 5)
    forced = {}
    for i in (0, 3):  # force the cheap configuration in blocks 0 and 3
        p = gadget_block_path(g, i)
        for a, b in zip(p, p[1:]):
            forced[(a, b)] = g.y
    for i in (1, 2):  # force it off elsewhere, via a vertical edge: adjacent
        p = gadget_block_path(g, i)  # blocks share their bridge edges
        forced[(p[1], p[2])] = g.z_high
    field = OverrideField(base, forced)
    assert block_occurs(field, g, 0) and block_occurs(field, g, 3)
    assert not block_occurs(field, g, 1) and not block_occurs(field, g, 2)
    cost, n_occ = constructed_path_cost(field, g, 4)
    assert n_occ == 2
    assert cost == pytest.approx(g.K * 2 + (g.K + 2) * 2 * g.y, abs=1e-12)


def test_pyramid_detection_small_run():
    g = GadgetSpec(y=0.2, p=0.4, K=1, z_high=4.0)
    verdict = pyramid_test(g, n=60, reps=20, seed=7, confidence=0.99,
                           gadget_mu_n=40, gadget_mu_reps=10)
    assert verdict.detected
    assert verdict.axis_estimate.certified_upper < 1.0
    assert verdict.analytic_bound == pytest.approx(0.9744)
    assert verdict.deterministic_axis_exact == 1.0
    # the gadget side's own constant sits below 1 (cheap edges near p_c density)
    # but stays above the inhomogeneous axis value: the pyramid beats both sides
    assert verdict.axis_estimate.point < verdict.gadget_axis_estimate.point
    js = verdict.to_json()
    assert js["verdict"] == "PyramidDetected"
    assert js["mu_minus_axis"]["caveat"] == "no lower-bound certificate"


def test_pyramid_control_is_not_detected():
    control = HalfPlane(PointMass(1.0), PointMass(1.0))
    from fppkit.estimate import axis_constant
    est = axis_constant(control, 40, 10, 3, confidence=0.99)
    assert est.certified_upper >= 1.0 - 1e-9
    assert est.point == 1.0


def test_polygon_exports():
    rows = polygon_csv_rows(DIAMOND)
    assert len(rows) == 4 and all("," in r for r in rows)
    svg1 = polygon_svg([(DIAMOND, "#336")], timestamp="T1")
    svg2 = polygon_svg([(DIAMOND, "#336")], timestamp="T2")
    stripped = [
        "\n".join(line for line in s.splitlines() if not line.startswith("<!--"))
        for s in (svg1, svg2)
    ]
    assert stripped[0] == stripped[1]
    assert svg1 != svg2
    assert "<path" in svg1 and svg1.startswith("<svg")
