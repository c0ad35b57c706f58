"""Sweep theta = f d/dz ^ dzb on the one-dimensional torus over constant Gaussian rationals f.

Prints |f|^2, the generalized-complex verdict and the rank of the real map F.
With ``--shift s`` it also samples the nonconstant coefficient ``s + e[1;0]``.
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from epc.algebroid import check_elliptic, gc_criterion
from epc.coeff import CoeffFn, GaussianRational, Torus
from epc.mcstruct import ExtendedPoisson


@dataclass
class SweepConfig:
    radius: int = 2
    denominator: int = 2
    shift: Fraction = Fraction(0)
    grid: int = 8


def theta(f: CoeffFn) -> ExtendedPoisson:
    return ExtendedPoisson.from_tables(f.model, theta={(0, 0): f})


def main(cfg: SweepConfig) -> None:
    T1 = Torus(1)
    steps = range(-cfg.radius * cfg.denominator, cfg.radius * cfg.denominator + 1)
    print(f"{'f':>12s} {'|f|^2':>8s} {'gc':>5s} {'rank F':>6s}")
    for a in steps:
        for b in steps:
            f = GaussianRational(Fraction(a, cfg.denominator), Fraction(b, cfg.denominator))
            if b < 0 or (b == 0 and a < 0):
                continue  # verdicts depend only on |f|; skip the mirrored half
            H = theta(CoeffFn.constant(T1, f))
            rank = check_elliptic(H).points[0]["rank"]
            norm = f.norm2()
            print(f"{str(f):>12s} {str(norm):>8s} {str(gc_criterion(H).verdict):>5s} {rank:6d}")
    if cfg.shift:
        f = CoeffFn.character(T1, [1], [0]) + CoeffFn.constant(T1, GaussianRational(cfg.shift))
        rep = check_elliptic(theta(f), G=cfg.grid)
        gc = gc_criterion(theta(f), G=cfg.grid)
        print(f"\nf = {cfg.shift} + e[1;0] on a {cfg.grid}x{cfg.grid} grid:")
        print(f"  degenerate points {len(rep.degenerate)} of {len(rep.points)}, elliptic verdict {rep.verdict}, gc verdict {gc.verdict}")
        print(f"  {rep.note}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--radius", type=int, default=SweepConfig.radius)
    p.add_argument("--denominator", type=int, default=SweepConfig.denominator)
    p.add_argument("--shift", type=Fraction, default=SweepConfig.shift)
    p.add_argument("--grid", type=int, default=SweepConfig.grid)
    a = p.parse_args()
    main(SweepConfig(a.radius, a.denominator, a.shift, a.grid))
