"""Homology dimensions and pairing ranks of truncated complexes for a few constant torus structures.

    python scripts/spectral_table.py --cutoffs 0 1 2
"""

import argparse
import time
from dataclasses import dataclass, field
from typing import Dict, List

from epc.coeff import CoeffFn, GaussianRational, Torus
from epc.mcstruct import ExtendedPoisson
from epc.spectral import duality_report


@dataclass
class TableConfig:
    cutoffs: List[int] = field(default_factory=lambda: [0, 1, 2])
    max_n2_cutoff: int = 2


def structures() -> Dict[str, ExtendedPoisson]:
    T1, T2 = Torus(1), Torus(2)
    c = lambda m, x: CoeffFn.constant(m, GaussianRational.coerce(x))
    return {
        "n=1 H=0": ExtendedPoisson.zero(T1),
        "n=1 theta=2": ExtendedPoisson.from_tables(T1, theta={(0, 0): c(T1, 2)}),
        "n=1 theta=1": ExtendedPoisson.from_tables(T1, theta={(0, 0): c(T1, 1)}),
        "n=2 H=0": ExtendedPoisson.zero(T2),
        "n=2 pi=d1^d2": ExtendedPoisson.from_tables(T2, pi={(0, 1): c(T2, 1)}),
    }


def main(cfg: TableConfig) -> None:
    print(f"{'structure':16s} {'M':>2s}  {'KB':20s} {'LP':20s} {'pairing':20s} {'ok':5s} {'sec':>6s}")
    for name, H in structures().items():
        for M in cfg.cutoffs:
            if H.n == 2 and M > cfg.max_n2_cutoff:
                continue
            t = time.perf_counter()
            rep = duality_report(H, M)
            dt = time.perf_counter() - t
            print(f"{name:16s} {M:2d}  {str(rep.kb_dims):20s} {str(rep.lp_dims):20s} {str(rep.pairing_ranks):20s} {str(rep.passed):5s} {dt:6.2f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cutoffs", type=int, nargs="+", default=TableConfig().cutoffs)
    p.add_argument("--max-n2-cutoff", type=int, default=TableConfig().max_n2_cutoff)
    a = p.parse_args()
    main(TableConfig(a.cutoffs, a.max_n2_cutoff))
