"""Tabulate the exponential bounds and the main_ap2 vs. Green crossover.

    python scripts/bound_tables.py --out results/tables
"""

from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

from capbound import bounds
from capbound.fmt import fmt_real


@dataclass
class TableConfig:
    out: Path = Path("results/tables")
    qs: tuple[int, ...] = (3, 5, 7, 9, 11, 13)
    ns: tuple[int, ...] = (1, 2, 5, 10, 20, 50, 100)
    ks: tuple[int, ...] = (2, 3, 4)
    j_qmax: int = 64
    crossover_nmax: int = 200
    digits: int = 8


def j_table(cfg: TableConfig) -> list[dict]:
    lim = bounds.j_limit_inf().value
    rows = []
    for q in range(3, cfg.j_qmax + 1):
        jv = bounds.j_constant(q, 3)
        rows.append({"q": q, "J": fmt_real(jv.value, cfg.digits), "x_star": fmt_real(jv.x_star, cfg.digits),
                     "qJ": fmt_real(q * jv.value, cfg.digits), "minus_limit": fmt_real(jv.value - lim, 4)})
    return rows


def cap_table(cfg: TableConfig) -> list[dict]:
    rows = []
    for q in cfg.qs:
        for n in cfg.ns:
            degP = n * (q - 1)
            rows.append({
                "q": q, "n": n,
                "maincor2": fmt_real(bounds.bound_maincor2(n, q, 3, degP), cfg.digits),
                "maincor4": fmt_real(bounds.bound_maincor4(q, n), cfg.digits),
                "trivial": q**n,
            })
    return rows


def crossover_table(cfg: TableConfig) -> list[dict]:
    rows = []
    for q in cfg.qs:
        for k in cfg.ks:
            if k * bounds.digit_sum(k, q) == 1:
                continue
            n0 = bounds.main_ap2_crossover(k, q, cfg.crossover_nmax)
            rows.append({"q": q, "k": k, "d": str(bounds.main_ap2_d(k, q)),
                         "base_qJ": fmt_real(q * bounds.j_constant(q, bounds.main_ap2_d(k, q)).value, cfg.digits),
                         "green_c": fmt_real(bounds.green_c(k, q), cfg.digits), "n0": n0})
    return rows


def write(rows: list[dict], path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=TableConfig.out)
    ap.add_argument("--crossover-nmax", type=int, default=TableConfig.crossover_nmax)
    args = ap.parse_args()
    cfg = TableConfig(out=args.out, crossover_nmax=args.crossover_nmax)
    write(j_table(cfg), cfg.out / "j_q3.csv")
    write(cap_table(cfg), cfg.out / "capset_bounds.csv")
    write(crossover_table(cfg), cfg.out / "main_ap2_crossover.csv")


if __name__ == "__main__":
    main()
