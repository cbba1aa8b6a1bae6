"""Desk-scale check of the slice-rank chain for cap sets in F_3^n.

For each n: the exact maximum AP-free size, the count bound m * #B, the
analytic bound 3 (3 J)^n and, when the tensor is small enough, the
slice-rank bracket of the progression polynomial on the witness.

    python scripts/capset_chain.py --n 1 2 3
    python scripts/capset_chain.py --n 4          # a few minutes
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from capbound import bounds
from capbound.ff import make_field
from capbound.grid_ideal import Grid
from capbound.poly import VarLayout
from capbound.search import build_ap_polynomial, is_ap_free, max_ap_free
from capbound.slicerank import decompose_upper


@dataclass
class ChainConfig:
    q: int = 3
    ns: list[int] = field(default_factory=lambda: [1, 2, 3])
    bracket_max_n: int = 3  # bracket tensor has size^3 entries
    out: str = ""


@dataclass
class ChainRow:
    n: int
    size: int
    nodes: int
    search_seconds: float
    count_bound: int
    analytic_bound: float
    lower: int | None = None
    upper: int | None = None
    witness: list = field(default_factory=list)


def run(cfg: ChainConfig) -> list[ChainRow]:
    F = make_field(cfg.q)
    rows = []
    for n in cfg.ns:
        t0 = time.perf_counter()
        res = max_ap_free(cfg.q, n)
        dt = time.perf_counter() - t0
        assert is_ap_free(res.witness)
        k = n * (cfg.q - 1)
        row = ChainRow(n, res.size, res.nodes, round(dt, 2), bounds.bound_main_exact(n, cfg.q, 3, k),
                       float(bounds.bound_maincor2(n, cfg.q, 3, k)), witness=res.witness.to_json()["points"])
        if n <= cfg.bracket_max_n:
            br = decompose_upper(build_ap_polynomial(cfg.q, n), Grid.full(F, n), VarLayout(3, n), res.witness)
            assert br.verify()
            row.lower, row.upper = br.lower, br.upper
        rows.append(row)
        print(f"n={n}: |F|={row.size} lower={row.lower} upper={row.upper} "
              f"m*#B={row.count_bound} 3(qJ)^n={row.analytic_bound:.3f} ({dt:.1f}s, {res.nodes} nodes)")
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--bracket-max-n", type=int, default=3)
    ap.add_argument("--out", default="")
    a = ap.parse_args()
    cfg = ChainConfig(q=a.q, ns=a.n, bracket_max_n=a.bracket_max_n, out=a.out)
    rows = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "rows": [asdict(r) for r in rows]}, fh, indent=1)


if __name__ == "__main__":
    main()
