"""Columnar-defect experiment: endpoint collapses, the exact realization
sandwich, mean comparisons and cylinder restrictions."""

import numpy as np
import pytest

from fppkit.dist import FiniteAtoms, PointMass
from fppkit.env import Homogeneous, RandomColumns, Site
from fppkit.estimate import homogeneous_mu, replication_times
from fppkit.defects import (
    HypothesisUnmet,
    cylinder_estimate,
    defect_estimate,
    defect_sandwich,
    epsilon_sweep,
    sweep_csv_rows,
)
from fppkit.fpp import Cylinder

D1 = PointMass(1.0)
DHALF = PointMass(0.5)


def test_identical_laws_collapse():
    rep = defect_sandwich(D1, D1, 0.5, 20, 6, 42)
    assert rep.estimate.point == 1.0
    assert rep.mu_f_axis.point == 1.0
    assert rep.mu_f0_axis.point == 1.0
    assert rep.hypothesis_met and rep.stochastic_coupling and rep.sandwich_exact


def test_point_mass_sandwich_is_exact():
    rep = defect_sandwich(D1, DHALF, 0.5, 30, 8, 7)
    assert rep.sandwich_exact
    assert 0.5 <= rep.estimate.point <= 1.0
    assert rep.mean_upper_ok and rep.mean_lower_ok
    js = rep.to_json()
    assert js["sandwich_exact"] is True
    assert "not reproducible" in js["note"]


def test_endpoint_collapses_shared_seed():
    target = Site(0, 25)
    t0 = replication_times(RandomColumns(D1, DHALF, 0.0), target, 6, 11)
    th = replication_times(Homogeneous(D1), target, 6, 11)
    assert (t0 == th).all()
    t1 = replication_times(RandomColumns(D1, DHALF, 1.0), target, 6, 11)
    th0 = replication_times(Homogeneous(DHALF), target, 6, 11)
    assert (t1 == th0).all()


def test_defect_estimate_strictly_between_and_decreasing():
    ests = epsilon_sweep(D1, DHALF, [0.1, 0.3, 0.6], 100, 24, 3)
    points = [e.point for _, e in ests]
    assert all(0.5 < p < 1.0 for p in points)
    assert points[0] > points[1] > points[2]
    rows = sweep_csv_rows(ests)
    assert rows[0] == "epsilon,point,stderr,n,reps"
    assert len(rows) == 4


def test_mean_preserving_spread_defects():
    f0 = FiniteAtoms(((0.0, 0.5), (2.0, 0.5)))  # F0(0) = 1/2: vanishing constant
    rep = defect_sandwich(D1, f0, 0.5, 40, 10, 5, exact=False)
    assert rep.hypothesis_met          # mean-preserving spread is more variable
    assert not rep.stochastic_coupling  # but not stochastically ordered
    assert rep.sandwich_exact is None
    assert rep.mean_upper_ok and rep.mean_lower_ok


def test_hypothesis_unmet_still_reports():
    with pytest.warns(HypothesisUnmet):
        rep = defect_sandwich(D1, PointMass(2.0), 0.3, 20, 4, 9)
    assert not rep.hypothesis_met
    assert rep.estimate.reps == 4


def test_cylinder_unit_weights():
    for k in (1, 4):
        est = cylinder_estimate(D1, k, 30, 4, 2)
        assert est.point == 1.0 and est.stderr == 0.0
    with pytest.raises(ValueError):
        cylinder_estimate(D1, 0, 30, 4, 2)


def test_cylinder_nesting_and_recovery():
    f0 = FiniteAtoms(((0.2, 0.4), (2.0, 0.6)))
    target = Site(0, 40)
    seed = 13
    narrow = replication_times(Homogeneous(f0), target, 12, seed, r=Cylinder(1))
    wide = replication_times(Homogeneous(f0), target, 12, seed, r=Cylinder(8))
    free = replication_times(Homogeneous(f0), target, 12, seed)
    assert (wide <= narrow).all()
    assert (free <= wide).all()
    big = cylinder_estimate(f0, 14, 40, 16, 21)
    unrestricted = homogeneous_mu(f0, (0, 1), 40, 16, 22)
    joint = float(np.hypot(big.stderr, unrestricted.stderr))
    assert big.point >= unrestricted.point - 3 * joint
    assert abs(big.point - unrestricted.point) <= 3 * joint + 0.05


def test_defect_estimate_has_certificate():
    est = defect_estimate(D1, DHALF, 0.3, 30, 8, 17, confidence=0.99)
    assert est.certified_upper is not None
    assert est.certified_upper >= est.point
