"""Growth sets and empirical limit shapes.

Unit weights make the model deterministic: the ball of radius t in passage
time is exactly the l1 ball, so the rescaled growth set is the unit diamond.
With half-plane inhomogeneity the two sides grow at different speeds and the
rescaled set converges to the convex hull of two half-shapes plus a vertical
segment. This script renders both at desk scale.
"""

import os

from fppkit import (
    Box,
    HalfPlane,
    Homogeneous,
    PointMass,
    Polygon,
    WeightField,
    empirical_shape,
    growth_set,
    hausdorff,
    hull_shape,
)
from fppkit.shape import polygon_svg

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

print("== deterministic growth ==")
field = WeightField(Homogeneous(PointMass(1.0)), seed=7)
ball = growth_set(field, 2.0, Box(-5, 5, -5, 5))
print(f"t=2 growth set has {len(ball)} sites (the 13-site l1 ball)")

diamond = Polygon.from_points([(1, 0), (0, 1), (-1, 0), (0, -1)])
shape = empirical_shape(Homogeneous(PointMass(1.0)), t=40.0, seed=7)
print(f"t=40 rescaled hull vs unit diamond: Hausdorff {hausdorff(shape, diamond):.4f}")

print("\n== mixed half-planes ==")
# weights 1 on the left, 1/2 on the right: the right side reaches twice as far,
# and the axis inherits the fast vertical speed
spec = HalfPlane(PointMass(1.0), PointMass(0.5))
emp = empirical_shape(spec, t=40.0, seed=7)
predicted = hull_shape(
    Polygon.from_points([(-1, 0), (0, 2), (0, -2), (0, 0)]),
    Polygon.from_points([(2, 0), (0, 2), (0, -2), (0, 0)]),
    nu=0.5,
)
print(f"empirical vs predicted hull: Hausdorff {hausdorff(emp, predicted):.4f}")

svg = polygon_svg([(emp, "#225588"), (predicted, "#cc3333")])
path = os.path.join(OUT, "mixed_half_planes.svg")
with open(path, "w") as fh:
    fh.write(svg)
print(f"wrote {path} (blue empirical, red predicted)")
