"""The vertical-axis pyramid.

Put cheap-or-expensive two-atom weights on the left half-plane and unit
weights on the right. Vertical progress can dip one column into the left
side whenever a block of K+2 edges there is cheap (all at most y), paying
(K+2) y instead of the K unit axis edges; for (K+2) y < K this wins, and the
law of large numbers gives the closed-form bound

    axis constant  <=  1 + p^(K+2) ((K+2) y - K) / K  <  1.

The estimator certifies an upper confidence bound strictly below 1, which is
exactly the unit side's axis constant, so the limit shape bulges along the
vertical axis: a pyramid. Each replication is truncation-exact, and the
geodesic turns out to do quite a bit better than the constructed block path.
"""

import os

from fppkit import GadgetSpec, Polygon, gadget_bound, hull_shape, pyramid_test
from fppkit.shape import constructed_path_cost, gadget_env, polygon_svg
from fppkit.env import WeightField

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

g = GadgetSpec(y=0.2, p=0.4, K=1, z_high=4.0)
print(f"gadget y={g.y} p={g.p} K={g.K}: analytic bound {gadget_bound(g)}")

field = WeightField(gadget_env(g), seed=4)
cost, hits = constructed_path_cost(field, g, blocks=400)
print(f"constructed block path over 400 blocks: cost {cost:.1f}, "
      f"{hits} cheap blocks ({hits / 4:.1f}% vs p^3 = 6.4%)")

# desk-scale run; the acceptance suite runs n=400, reps=200 at 99% confidence
verdict = pyramid_test(g, n=150, reps=40, seed=11, confidence=0.99,
                       gadget_mu_n=80, gadget_mu_reps=16)
est = verdict.axis_estimate
print(f"\naxis estimate {est.point:.4f} +- {est.stderr:.4f}")
print(f"certified upper bound {est.certified_upper:.4f} vs unit side constant 1.0")
print(f"gadget side's own axis constant {verdict.gadget_axis_estimate.point:.4f} "
      "(statistical only, no lower-bound certificate)")
print(f"verdict: {verdict.verdict}")

nu = est.certified_upper
half = Polygon.from_points([(0, 1), (1, 0), (0, -1), (0, 0)])
mirror = Polygon.from_points([(0, 1), (-1, 0), (0, -1), (0, 0)])
with_pyramid = hull_shape(mirror, half, nu)
plain = Polygon.from_points([(1, 0), (0, 1), (-1, 0), (0, -1)])
path = os.path.join(OUT, "pyramid_shape.svg")
with open(path, "w") as fh:
    fh.write(polygon_svg([(with_pyramid, "#225588"), (plain, "#bbbbbb")]))
print(f"wrote {path} (sketch: unit-side diamond, axis bulge at 1/{nu:.3f})")
