#!/usr/bin/env python3
"""Regenerate tests/data/golden_poses.csv.

The local coordinates are computed here by an independent mirror of the
wall-frame construction, on purpose written against plain `math` rather
than the C++ code: walls are quarter-turn frames, so the along/inward
components come from exact swap/negate of the displacement, the distance
from math.sqrt(lx*lx + ly*ly), the polar angle from math.atan2 scaled by
180/pi and shifted into [0, 360), and the orientation from
math.fmod(theta_p + offset, 360).  Every value is serialized with repr(),
which round-trips doubles exactly, and the consumer compares bit for bit.
"""

import math
import os

OFFSETS = {1: 0.0, 2: 90.0, 3: 180.0, 4: 270.0}


def to_local(wall, xs, ys, zs, xp, yp, theta_p):
    dx = xp - xs
    dy = yp - ys
    if wall == 1:
        lx, ly = dx, dy
    elif wall == 2:
        lx, ly = -dy, dx
    elif wall == 3:
        lx, ly = -dx, -dy
    else:
        lx, ly = dy, -dx
    r = math.sqrt(lx * lx + ly * ly)
    psi = math.atan2(ly, lx) * (180.0 / math.pi)
    if psi < 0.0:
        psi += 360.0
    theta_s = math.fmod(theta_p + OFFSETS[wall], 360.0)
    return r, psi, theta_s, zs


# (wall, xs, ys, zs, xp, yp, theta_p, derivation note)
POSES = [
    (1, 1.0, 0.0, 0.5, 1.0, 1.3, 0.0,
     "straight ahead: d=(0,1.3) -> r=1.3, psi=90, theta_s=0"),
    (1, 2.5, 0.0, 1.25, 0.5, 2.0, 45.0,
     "diagonal back-left: d=(-2,2) -> r=2*sqrt(2), psi=135, theta_s=45"),
    (1, 3.0, 0.0, 0.25, 3.5, 0.5, 315.0,
     "diagonal front-right: d=(0.5,0.5) -> r=sqrt(0.5), psi=45, theta_s=315"),
    (2, 0.0, 1.0, 0.75, 3.0, 1.0, 350.0,
     "frame turns 90: d=(3,0) -> local (0,3), r=3, psi=90, theta_s=wrap(440)=80"),
    (2, 0.0, 2.0, 1.0, 1.0, 1.0, 0.0,
     "d=(1,-1) -> local (1,1), r=sqrt(2), psi=45, theta_s=90"),
    (2, 0.0, 0.5, 1.75, 0.05, 2.5, 180.0,
     "grazing: d=(0.05,2) -> local (-2,0.05), psi just under 180, theta_s=270"),
    (3, 2.0, 3.0, 1.0, 1.0, 2.0, 200.0,
     "frame turns 180: d=(-1,-1) -> local (1,1), r=sqrt(2), psi=45, theta_s=wrap(380)=20"),
    (3, 0.5, 3.0, 0.3, 0.5, 0.5, 0.0,
     "d=(0,-2.5) -> local (0,2.5), r=2.5, psi=90, theta_s=180"),
    (3, 3.5, 3.0, 2.0, 3.0, 2.95, 90.0,
     "shallow: d=(-0.5,-0.05) -> local (0.5,0.05), psi=atan2(0.05,0.5) deg, theta_s=270"),
    (4, 4.0, 1.5, 1.0, 3.0, 1.5, 45.0,
     "frame turns 270: d=(-1,0) -> local (0,1), r=1, psi=90, theta_s=315"),
    (4, 4.0, 0.5, 0.25, 3.95, 2.5, 90.0,
     "grazing: d=(-0.05,2) -> local (2,0.05), psi=atan2(0.05,2) deg, theta_s=0"),
    (4, 4.0, 2.7, 1.5, 2.0, 0.7, 270.0,
     "d=(-2,-2) -> local (-2,2), r=2*sqrt(2), psi=135, theta_s=wrap(540)=180"),
]


def main():
    out_path = os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                            "golden_poses.csv")
    lines = [
        "# Hand-derived wall-local coordinates, three poses per wall.",
        "# Regenerate with tools/make_golden_poses.py; outputs are",
        "# serialized with shortest round-trip decimals and compared",
        "# bit for bit.",
        "wall,xs,ys,zs,xp,yp,theta_p,r,psi,theta_s,z",
    ]
    for wall, xs, ys, zs, xp, yp, theta_p, note in POSES:
        r, psi, theta_s, z = to_local(wall, xs, ys, zs, xp, yp, theta_p)
        lines.append("# " + note)
        lines.append(",".join(
            [str(wall)] +
            [repr(v) for v in (xs, ys, zs, xp, yp, theta_p, r, psi, theta_s,
                               z)]))
    with open(out_path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {out_path} ({len(POSES)} poses)")


if __name__ == "__main__":
    main()
