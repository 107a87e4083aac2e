"""Monte-Carlo BLER sweeps and PMP collection.

Frame ``i`` of a run draws its payload and noise from the counter-based
stream keyed by ``(seed, i)``.  Every SNR point and every decoder therefore
sees the same payloads and unit-variance noise realisations, and the
results do not depend on how frames are split across worker processes.
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import beta as beta_dist

from .analysis import PmpTable
from .channel import make_rng, transmit
from .list_decoder import LIST_SIZES, decode_sc, decode_scl, decode_sscl
from .polar_code import (CRC11_POLY, CodeConfig, ConfigError, build_reliability_order, embed,
                         encode, extract, load_reliability_order)
from .ps_select import SelectionProfile
from .sc_kernel import MINSUM, MODES

log = logging.getLogger(__name__)

DECODERS = ("sc", "scl", "sscl", "ps-scl")
CHUNK = 256


@dataclass(frozen=True)
class SimConfig:
    code: CodeConfig
    es_n0_sweep: tuple[float, ...]
    decoder: str = "ps-scl"
    list_size: int = 8
    profile: SelectionProfile | None = None
    max_frames: int = 1_000_000
    min_frame_errors: int = 100
    seed: int = 0
    combine: str = MINSUM
    crc_aided: bool = True
    workers: int = 1
    backend: str | None = None
    box_profiles: tuple = ()
    warmup: str = "stair"

    def __post_init__(self):
        problems = []
        if self.decoder not in DECODERS:
            problems.append(f"decoder: must be one of {DECODERS}, got {self.decoder!r}")
        if self.list_size not in LIST_SIZES:
            problems.append(f"list_size: must be one of {LIST_SIZES}, got {self.list_size}")
        if not self.es_n0_sweep:
            problems.append("es_n0_sweep: must be nonempty")
        elif not all(math.isfinite(v) for v in self.es_n0_sweep):
            problems.append("es_n0_sweep: values must be finite")
        if self.max_frames < 1:
            problems.append(f"max_frames: must be >= 1, got {self.max_frames}")
        if self.min_frame_errors < 1:
            problems.append(f"min_frame_errors: must be >= 1, got {self.min_frame_errors}")
        if self.workers < 1:
            problems.append(f"workers: must be >= 1, got {self.workers}")
        if self.warmup not in ("stair", "full"):
            problems.append(f"warmup: must be stair or full, got {self.warmup!r}")
        if self.combine not in MODES:
            problems.append(f"combine: must be one of {MODES}, got {self.combine!r}")
        if self.decoder == "ps-scl":
            if self.profile is None:
                problems.append("profile: required for ps-scl")
            else:
                try:
                    self.profile.validate_for(self.code.node_size, self.list_size)
                except ConfigError as exc:
                    problems.append(f"profile: {exc}")
        if problems:
            raise ConfigError("; ".join(problems))

    def label(self) -> str:
        parts = [self.decoder, f"L{self.list_size}", f"nv{self.code.node_size}"]
        if self.decoder == "ps-scl":
            parts.append("p" + "-".join(map(str, self.profile.keep_counts)))
            if self.warmup == "full":
                parts.append("fullwarmup")
        return "_".join(parts)


@dataclass
class PointResult:
    es_n0_db: float
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    wall_time: float = field(default=0.0, compare=False)
    payload_bits: int = 1

    @property
    def bler(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.payload_bits) if self.frames else float("nan")

    def confidence_interval(self, level: float = 0.95) -> tuple[float, float]:
        return clopper_pearson(self.frame_errors, self.frames, level)


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(beta_dist.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta_dist.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def decode_frame(cfg: SimConfig, llr: np.ndarray) -> np.ndarray:
    """Run the configured decoder and return the decided information bits."""
    code = cfg.code
    if cfg.decoder == "sc":
        return extract(code, decode_sc(code, llr, cfg.combine))
    if cfg.decoder == "scl":
        res = decode_scl(code, llr, cfg.list_size, cfg.crc_aided, cfg.combine, cfg.backend)
    else:
        prof = cfg.profile if cfg.decoder == "ps-scl" else None
        res = decode_sscl(code, llr, cfg.list_size, prof, cfg.crc_aided, cfg.combine, cfg.backend,
                          full_warmup=cfg.warmup == "full")
    return res.info


def make_frame(code: CodeConfig, es_n0_db: float, seed: int, index: int):
    rng = make_rng(seed, index)
    payload = rng.integers(0, 2, code.k_payload, dtype=np.uint8)
    x = encode(code, embed(code, code.crc.attach(payload)))
    return payload, transmit(x, es_n0_db, rng)


def _bler_chunk(cfg: SimConfig, es_n0_db: float, start: int, stop: int):
    errs = np.zeros(stop - start, dtype=bool)
    bits = np.zeros(stop - start, dtype=np.int64)
    for i in range(start, stop):
        payload, llr = make_frame(cfg.code, es_n0_db, cfg.seed, i)
        decided = decode_frame(cfg, llr)[: cfg.code.k_payload]
        nb = int(np.count_nonzero(decided != payload))
        bits[i - start] = nb
        errs[i - start] = nb > 0
    return errs, bits


def _chunks(max_frames: int, chunk: int):
    start = 0
    while start < max_frames:
        yield start, min(start + chunk, max_frames)
        start += chunk


def run_point(cfg: SimConfig, es_n0_db: float, pool=None) -> PointResult:
    """Simulate one SNR point until ``min_frame_errors`` or ``max_frames``.

    The stop is applied at the exact frame that reaches the error target, so
    chunks computed speculatively by other workers are discarded.
    """
    res = PointResult(es_n0_db, payload_bits=cfg.code.k_payload)
    t0 = time.perf_counter()
    chunks = list(_chunks(cfg.max_frames, CHUNK))
    width = cfg.workers if pool is not None else 1
    for batch_start in range(0, len(chunks), width):
        batch = chunks[batch_start: batch_start + width]
        if pool is None:
            outs = [_bler_chunk(cfg, es_n0_db, a, b) for a, b in batch]
        else:
            outs = list(pool.map(_bler_chunk, [cfg] * len(batch), [es_n0_db] * len(batch),
                                 [a for a, _ in batch], [b for _, b in batch]))
        done = False
        for errs, bits in outs:
            need = cfg.min_frame_errors - res.frame_errors
            cum = np.cumsum(errs)
            hit = np.flatnonzero(cum >= need)
            take = int(hit[0]) + 1 if hit.size else errs.size
            res.frames += take
            res.frame_errors += int(errs[:take].sum())
            res.bit_errors += int(bits[:take].sum())
            if hit.size:
                done = True
                break
        if done:
            break
    res.wall_time = time.perf_counter() - t0
    return res


def _pool(cfg: SimConfig):
    return ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None


def run_bler_sweep(cfg: SimConfig) -> list[PointResult]:
    pool = _pool(cfg)
    try:
        out = []
        for es in cfg.es_n0_sweep:
            r = run_point(cfg, es, pool)
            log.info("%s Es/N0=%.2f dB frames=%d errors=%d BLER=%.3e (%.1fs)",
                     cfg.label(), es, r.frames, r.frame_errors, r.bler, r.wall_time)
            out.append(r)
        return out
    finally:
        if pool is not None:
            pool.shutdown()


BLER_FIELDS = ("es_n0_db", "frames", "frame_errors", "bit_errors", "bler", "ber", "bler_ci_low", "bler_ci_high")


def bler_csv_text(results: list[PointResult]) -> str:
    """Deterministic CSV: one row per SNR point, wall time excluded."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BLER_FIELDS)
    for r in results:
        lo, hi = r.confidence_interval()
        w.writerow([f"{r.es_n0_db:.4f}", r.frames, r.frame_errors, r.bit_errors,
                    f"{r.bler:.6e}", f"{r.ber:.6e}", f"{lo:.6e}", f"{hi:.6e}"])
    return buf.getvalue()


def _pmp_chunk(cfg: SimConfig, es_n0_db: float, start: int, stop: int) -> PmpTable:
    table = PmpTable.for_decoder(cfg.list_size, cfg.code.node_size)
    for i in range(start, stop):
        _, llr = make_frame(cfg.code, es_n0_db, cfg.seed, i)
        decode_sscl(cfg.code, llr, cfg.list_size, None, cfg.crc_aided, cfg.combine, cfg.backend,
                    pmp_table=table)
    return table


def run_pmp_collection(cfg: SimConfig) -> PmpTable:
    """Full-selection SSCL over ``max_frames`` frames at the first sweep point."""
    es = cfg.es_n0_sweep[0]
    chunks = list(_chunks(cfg.max_frames, 4 * CHUNK))
    pool = _pool(cfg)
    try:
        if pool is None:
            parts = [_pmp_chunk(cfg, es, a, b) for a, b in chunks]
        else:
            parts = list(pool.map(_pmp_chunk, [cfg] * len(chunks), [es] * len(chunks),
                                  [a for a, _ in chunks], [b for _, b in chunks]))
    finally:
        if pool is not None:
            pool.shutdown()
    table = PmpTable.for_decoder(cfg.list_size, cfg.code.node_size)
    for part in parts:
        table = table + part
    return table


def snr_at_bler(results: list[PointResult], target: float) -> float:
    """Es/N0 where the BLER curve crosses ``target`` (log-linear interpolation)."""
    pts = sorted((r.es_n0_db, r.bler) for r in results if r.frames)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 >= target >= y1 and y0 > 0 and y1 > 0:
            if y0 == y1:
                return x0
            return x0 + (math.log10(y0) - math.log10(target)) * (x1 - x0) / (math.log10(y0) - math.log10(y1))
    raise ValueError(f"BLER curve does not bracket {target}: {pts}")


# configuration files -------------------------------------------------------

def parse_sweep(text: str) -> tuple[float, ...]:
    """``a:b:step`` (inclusive) or a comma-separated list of values."""
    text = text.strip()
    try:
        if ":" in text:
            a, b, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ConfigError(f"esn0: step must be positive, got {step}")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return tuple(round(a + i * step, 10) for i in range(count))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"esn0: cannot parse {text!r}") from exc


def _int(section, key, default):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc


def read_config(path: str | Path | None, overrides: dict | None = None) -> tuple[SimConfig, str]:
    """Load a ``[code]``/``[sim]`` key=value file and apply CLI overrides.

    Returns the validated :class:`SimConfig` and the task name
    (``bler``, ``pmp`` or ``cas``).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_dict({"code": {}, "sim": {}})
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file {path} not found")
        parser.read(path, encoding="utf-8")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        section = "code" if key in ("n_block", "k_payload", "k_crc", "node_size", "crc_poly",
                                    "reliability_file") else "sim"
        parser[section][key] = str(value)
    code_s, sim_s = parser["code"], parser["sim"]

    n_block = _int(code_s, "n_block", 128)
    k_payload = _int(code_s, "k_payload", 38)
    k_crc = _int(code_s, "k_crc", 11)
    node_size = _int(code_s, "node_size", 4)
    crc_poly = _int(code_s, "crc_poly", CRC11_POLY)
    rel = code_s.get("reliability_file")
    if rel:
        rel_path = Path(rel)
        if path is not None and not rel_path.is_absolute():
            rel_path = Path(path).parent / rel_path
        order = load_reliability_order(rel_path, n_block)
    else:
        order = build_reliability_order(n_block)
    code = CodeConfig.from_pw(n_block, k_payload, k_crc, node_size, crc_poly, order)

    decoder = sim_s.get("decoder", "ps-scl").strip()
    profile = None
    if sim_s.get("profile"):
        profile = SelectionProfile.parse(sim_s["profile"])
    elif decoder == "ps-scl":
        profile = SelectionProfile((4, 2, 1))
    boxes = []
    for item in (sim_s.get("box_profiles") or "4,2,1;4;8,4,2").split(";"):
        item = item.strip()
        if item:
            boxes.append(int(item) if "," not in item else SelectionProfile.parse(item))
    cfg = SimConfig(
        code=code,
        es_n0_sweep=parse_sweep(sim_s.get("esn0", "1:3:0.5")),
        decoder=decoder,
        list_size=_int(sim_s, "list_size", 8),
        profile=profile,
        max_frames=_int(sim_s, "max_frames", 1_000_000),
        min_frame_errors=_int(sim_s, "min_frame_errors", 100),
        seed=_int(sim_s, "seed", 0),
        combine=sim_s.get("combine", MINSUM).strip(),
        crc_aided=sim_s.getboolean("crc_aided", True),
        workers=_int(sim_s, "workers", 1),
        backend=(sim_s.get("backend") or None),
        box_profiles=tuple(boxes),
        warmup=sim_s.get("warmup", "stair").strip(),
    )
    task = sim_s.get("mode", "bler").strip()
    if task not in ("bler", "pmp", "cas"):
        raise ConfigError(f"mode: must be bler, pmp or cas, got {task!r}")
    return cfg, task


def with_decoder(cfg: SimConfig, decoder: str, profile: SelectionProfile | None = None, **changes) -> SimConfig:
    return replace(cfg, decoder=decoder, profile=profile, **changes)
