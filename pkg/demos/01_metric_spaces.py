"""Building and validating finite pointed metric spaces.

Everything downstream (norms, certificates, experiments) starts from a
validated distance matrix with a distinguished base point. This script
walks through the constructors and the betweenness scan that predicts
extremality.
"""

from lipfree import (
    PointPair,
    circle_net,
    from_weighted_graph,
    intermediate_points,
    interval_net,
    snowflake,
    validate_space,
)
from lipfree.errors import TriangleViolation

print("== validating a raw matrix ==")
space = validate_space([[0, 1], [1, 0]])
print(f"two points at distance {space.d(0, 1)}, tolerance {space.tol:.1e}")

try:
    validate_space([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
except TriangleViolation as exc:
    print("rejected:", exc)

print("\n== shortest-path metrics from weighted graphs ==")
tripod = from_weighted_graph(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)],
                             labels=("c", "l1", "l2", "l3"))
print("tripod distances:")
print(tripod.dist)

print("\n== interval and circle nets ==")
net = interval_net(4)
print(f"interval_net(4): {net.n} points, labels {net.labels}")
circle = circle_net(4)
print(f"circle_net(4): adjacent chord {circle.d(0, 1):.6f} (= sqrt 2), "
      f"diameter {circle.d(0, 2)}")

print("\n== snowflaking bends triangles strict ==")
path = from_weighted_graph(3, [(0, 1, 1), (1, 2, 1)])
flaked = snowflake(path, 0.5)
print(f"path: d(0,2) = {path.d(0, 2)}  -> snowflaked: d(0,2) = "
      f"{flaked.d(0, 2):.6f} < d(0,1)+d(1,2) = {flaked.d(0, 1) + flaked.d(1, 2):.6f}")

print("\n== metric betweenness ==")
for name, s, pair in [
    ("path (0,2)", path, PointPair(0, 2)),
    ("snowflaked path (0,2)", flaked, PointPair(0, 2)),
    ("tripod leaves (1,2)", tripod, PointPair(1, 2)),
]:
    mids = intermediate_points(s, pair)
    print(f"{name}: intermediate points {mids}"
          + ("  (pair is metrically strict)" if not mids else ""))

print("\nPairs with no intermediate point are exactly the extreme molecule")
print("pairs of the transport unit ball; demo 03 checks that with an LP.")
