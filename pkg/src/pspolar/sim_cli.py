"""Command-line entry point: ``pspolar-sim``.

Examples::

    pspolar-sim --config configs/bler_nv4_L32.cfg --out results/
    pspolar-sim --mode cas --out results/
    pspolar-sim --decoder ps-scl --list 32 --profile 4,2,1 --node-size 4 \\
        --esn0 1:3:0.5 --seed 1 --out results/
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analysis import SPLITTING_CLASSES, box_probability, cas_csv_text, pmp_csv_text, report_cas
from .nodes import NodeClass
from .polar_code import ConfigError
from .simulation import DECODERS, bler_csv_text, read_config, run_bler_sweep, run_pmp_collection

log = logging.getLogger("pspolar")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pspolar-sim", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, help="key=value file with [code] and [sim] sections")
    p.add_argument("--mode", choices=("bler", "pmp", "cas"))
    p.add_argument("--decoder", choices=DECODERS)
    p.add_argument("--list", dest="list_size", type=int)
    p.add_argument("--profile", help="stair keep counts x,y,z")
    p.add_argument("--node-size", type=int, choices=(4, 8))
    p.add_argument("--esn0", help="Es/N0 sweep a:b:step in dB, or a comma list")
    p.add_argument("--seed", type=int)
    p.add_argument("--frames", dest="max_frames", type=int, help="maximum frames per point")
    p.add_argument("--min-errors", dest="min_frame_errors", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--combine", choices=("minsum", "exact"))
    p.add_argument("--warmup", choices=("stair", "full"),
                   help="apply the stair profile from the first node (default) or only once the list is full")
    p.add_argument("--crc-poly", help="CRC polynomial as an integer, e.g. 0xE21")
    p.add_argument("--reliability", dest="reliability_file", help="override reliability sequence file")
    p.add_argument("--backend", choices=("compiled", "python"))
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(asctime)s %(message)s")
    overrides = {k: getattr(args, k) for k in (
        "mode", "decoder", "list_size", "profile", "node_size", "seed", "max_frames",
        "min_frame_errors", "workers", "combine", "warmup", "crc_poly", "reliability_file", "backend")}
    overrides["esn0"] = args.esn0
    try:
        cfg, task = read_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if task == "cas":
        _write(args.out / "cas_table.csv", cas_csv_text(report_cas()))
    elif task == "pmp":
        table = run_pmp_collection(cfg)
        tag = f"N{cfg.code.n_block}_L{cfg.list_size}_nv{cfg.code.node_size}"
        _write(args.out / f"pmp_{tag}.csv", pmp_csv_text(table.probabilities()))
        for cls in SPLITTING_CLASSES:
            if table.steps[int(cls)]:
                _write(args.out / f"pmp_{tag}_{cls.name.lower()}.csv", pmp_csv_text(table.probabilities((cls,))))
        lines = ["box,probability"]
        for box in cfg.box_profiles:
            label = f"rect_{box}" if isinstance(box, int) else "stair_" + "-".join(map(str, box.keep_counts))
            lines.append(f"{label},{box_probability(table, box):.6f}")
        lines.append(f"whole,{box_probability(table, 1 << cfg.code.node_size):.6f}")
        _write(args.out / f"pmp_{tag}_boxes.csv", "\n".join(lines) + "\n")
        log.info("node steps per class: %s",
                 {NodeClass(i).name: int(s) for i, s in enumerate(table.steps)})
    else:
        results = run_bler_sweep(cfg)
        _write(args.out / f"bler_{cfg.label()}.csv", bler_csv_text(results))
    return 0


if __name__ == "__main__":
    sys.exit(main())
