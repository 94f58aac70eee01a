"""Deterministic Monte Carlo estimation of logical failure rates.

Trials are grouped in blocks. Block ``b`` of grid point ``key`` draws all of
its randomness from ``SeedSequence(seed, spawn_key=(key, b))``, where
``key`` hashes the code, bias and error rate but not the decoder, so
different decoders see the same errors (matched seeds). Blocks are reduced
in index order and the stop rule is applied after each block, so counts
do not depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from .code import StabilizerCode, make_code
from .noise import NoiseChannel, format_eta, parse_eta, sample_errors
from .pauli import bits_to_hex

__all__ = [
    "DECODERS",
    "WORKERS_ENV",
    "CSV_COLUMNS",
    "TrialError",
    "TrialRecord",
    "SweepConfig",
    "PointStats",
    "TrialStatistics",
    "wilson_interval",
    "size_kwargs",
    "make_decoder",
    "format_phi",
    "parse_phi",
    "format_fraction",
    "run_trial",
    "run_block",
    "run_point",
    "run_sweep",
    "iter_sweep",
    "point_key",
    "block_rng",
    "default_workers",
]

#: Environment variable giving the default worker count.
WORKERS_ENV = "DWCODE_WORKERS"

DECODERS = ("restriction", "restriction-ref", "ml", "infinite-bias", "domain", "surface")

CSV_COLUMNS = (
    "code", "family", "d", "L1", "L2", "kappa", "phi", "eta", "p", "decoder",
    "trials", "failures", "p_L", "ci_lo", "ci_hi", "seed", "seconds",
)


class TrialError(RuntimeError):
    """A decoder broke an invariant; carries what is needed to replay the trial."""

    def __init__(self, msg: str, seed: int, key: int, block: int, shot: int, error_x: str, error_z: str) -> None:
        super().__init__(f"{msg} (seed={seed}, key={key}, block={block}, shot={shot}, x={error_x}, z={error_z})")
        self.seed, self.key, self.block, self.shot = seed, key, block, shot
        self.error_x, self.error_z = error_x, error_z


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one decoding trial."""

    trial_index: int
    error_weight: int
    syndrome_weight: int
    decoder: str
    success: bool
    logical_class: int


def format_fraction(v: object) -> str:
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_phi(phi: object) -> str:
    """φ (a multiple of π) as a token such as ``"0"``, ``"pi/4"`` or ``"1*pi/6"``."""
    f = Fraction(phi)
    if f == 0:
        return "0"
    return f"{f.numerator}*pi/{f.denominator}"


def parse_phi(tok: object) -> Fraction:
    """Parse a φ token (``"k*pi/m"``, ``"pi/m"``, ``"0"`` or a bare fraction of π)."""
    if not isinstance(tok, str):
        return Fraction(tok)
    t = tok.replace(" ", "").lower()
    if "pi" not in t:
        return Fraction(t)
    num, _, den = t.partition("pi")
    num = num.rstrip("*") or "1"
    den = den.lstrip("/") or "1"
    return Fraction(num) / Fraction(den)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes in ``n`` trials."""
    if n <= 0:
        return 0.0, 1.0
    ph = k / n
    den = 1.0 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def size_kwargs(family: str, size: int) -> dict:
    """Map a size to the keyword :func:`make_code` expects for ``family``."""
    fam = family.lower()
    if fam.endswith("-periodic"):
        return {"L": int(size)}
    if fam.endswith("-coprime"):
        return {"k": int(size)}
    return {"d": int(size)}


def make_decoder(name: str, code: StabilizerCode, ch: NoiseChannel):
    """Instantiate a decoder by registry name."""
    if name == "restriction":
        from .restriction import RestrictionDecoder

        return RestrictionDecoder(code, ch)
    if name == "restriction-ref":
        from .restriction import RestrictionDecoder

        return RestrictionDecoder(code, ch, engine="reference")
    if name == "ml":
        from .exact import MLDecoder

        return MLDecoder(code, ch)
    if name == "infinite-bias":
        from .infinite_bias import InfiniteBiasDecoder

        return InfiniteBiasDecoder(code, ch)
    if name == "domain":
        from .infinite_bias import DomainDecoder

        return DomainDecoder(code, ch)
    if name == "surface":
        from .surface import SurfaceMatchingDecoder

        return SurfaceMatchingDecoder(code, ch)
    raise ValueError(f"unknown decoder {name!r}; choose from {', '.join(DECODERS)}")


@dataclass(frozen=True)
class SweepConfig:
    """Grid of (size, p) points for one family, deformation, bias and decoder."""

    family: str
    sizes: tuple[int, ...]
    p_grid: tuple[float, ...]
    eta: object = Fraction(1, 2)
    decoder: str = "restriction"
    kappa: object | None = None
    phi: object | None = None
    trials: int = 10_000
    max_failures: int | None = None
    seed: int = 0
    block_size: int = 10_000
    workers: int | None = None
    phase: int | None = None
    twist: int = 1
    timing: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if any(b <= a for a, b in zip(self.p_grid, self.p_grid[1:])):
            raise ValueError("p grid must be strictly increasing")
        if any(not 0 <= p <= 1 for p in self.p_grid):
            raise ValueError("p values must lie in [0, 1]")
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; choose from {', '.join(DECODERS)}")
        if self.max_failures is not None and self.max_failures < 1:
            raise ValueError("max_failures must be >= 1")
        parse_eta(self.eta)

    def point(self, size: int, p: float) -> dict:
        """Canonical, hashable description of one grid point."""
        return {
            "family": self.family.lower(),
            "size": int(size),
            "kappa": None if self.kappa is None else format_fraction(self.kappa),
            "phi": None if self.phi is None else format_phi(parse_phi(self.phi)),
            "phase": self.phase,
            "twist": self.twist,
            "eta": format_eta(parse_eta(self.eta)),
            "p": float(p),
            "decoder": self.decoder,
        }


def point_key(point: dict) -> int:
    """32-bit stream key of a grid point; the decoder is excluded on purpose."""
    d = {k: v for k, v in point.items() if k != "decoder"}
    return zlib.crc32(json.dumps(d, sort_keys=True).encode())


def block_rng(seed: int, key: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key, block)))


@lru_cache(maxsize=16)
def _context_cached(frozen: str):
    point = json.loads(frozen)
    kw = size_kwargs(point["family"], point["size"])
    phi = None if point["phi"] is None else parse_phi(point["phi"])
    code = make_code(point["family"], kappa=point["kappa"], phi=phi, phase=point["phase"], twist=point["twist"], **kw)
    ch = NoiseChannel(point["p"], point["eta"])
    return code, ch, make_decoder(point["decoder"], code, ch)


def _context(point: dict):
    return _context_cached(json.dumps(point, sort_keys=True))


def run_block(
    code: StabilizerCode, ch: NoiseChannel, decoder, rng: np.random.Generator, shots: int, replay: tuple[int, int, int] = (0, 0, 0)
) -> tuple[int, NDArray[np.int64]]:
    """Run ``shots`` trials; return the failure count and the residual classes."""
    if shots == 0:
        return 0, np.zeros(0, np.int64)
    x, z = sample_errors(ch, code.n, rng, shots)
    s = code.syndromes(x, z)
    cx, cz = decoder.decode_batch(s)
    bad = np.flatnonzero((code.syndromes(cx, cz) != s).any(axis=1))
    if bad.size:
        i = int(bad[0])
        raise TrialError("correction syndrome differs from the measured syndrome", *replay, i, bits_to_hex(x[i]), bits_to_hex(z[i]))
    cls = code.logical_classes(x ^ cx, z ^ cz)
    return int(np.count_nonzero(cls)), cls


def run_trial(code: StabilizerCode, ch: NoiseChannel, decoder, rng: np.random.Generator, index: int = 0) -> TrialRecord:
    """Sample one error, decode it and classify the residual."""
    x, z = sample_errors(ch, code.n, rng, 1)
    s = code.syndromes(x, z)
    cx, cz = decoder.decode_batch(s)
    rx, rz = x ^ cx, z ^ cz
    if code.syndromes(rx, rz).any():
        raise TrialError("residual has a nonzero syndrome", 0, 0, 0, index, bits_to_hex(x[0]), bits_to_hex(z[0]))
    cls = int(code.logical_classes(rx, rz)[0])
    return TrialRecord(
        trial_index=index,
        error_weight=int((x[0] | z[0]).sum()),
        syndrome_weight=int(s[0].sum()),
        decoder=getattr(decoder, "name", type(decoder).__name__),
        success=cls == 0,
        logical_class=cls,
    )


def _block_task(args) -> tuple[int, int]:
    point, seed, key, block, shots = args
    code, ch, dec = _context(point)
    f, _ = run_block(code, ch, dec, block_rng(seed, key, block), shots, (seed, key, block))
    return f, shots


@dataclass
class PointStats:
    """Aggregated result for one (code, p) grid point; fields match the CSV columns."""

    code: str
    family: str
    d: int | None
    L1: int | None
    L2: int | None
    kappa: str
    phi: str
    eta: str
    p: float
    decoder: str
    trials: int
    failures: int
    p_L: float
    ci_lo: float
    ci_hi: float
    seed: int
    seconds: float

    @property
    def size(self) -> int:
        return int(self.d if self.d is not None else self.L1)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PointStats":
        conv = {
            "d": _opt_int, "L1": _opt_int, "L2": _opt_int, "p": float, "trials": int, "failures": int,
            "p_L": float, "ci_lo": float, "ci_hi": float, "seed": int, "seconds": float,
        }
        vals = {}
        for f in fields(cls):
            v = d[f.name]
            vals[f.name] = conv[f.name](v) if f.name in conv else str(v)
        return cls(**vals)


def _opt_int(v) -> int | None:
    if v is None or v == "":
        return None
    return int(v)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class TrialStatistics:
    """Ordered collection of :class:`PointStats` with JSON-lines and CSV I/O."""

    points: list[PointStats] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def extend(self, other: Iterable[PointStats]) -> None:
        self.points.extend(other)

    def sizes(self) -> list[int]:
        return sorted({pt.size for pt in self.points})

    def to_jsonl(self) -> str:
        return "".join(json.dumps(pt.to_dict()) + "\n" for pt in self.points)

    @classmethod
    def from_jsonl(cls, text: str) -> "TrialStatistics":
        return cls([PointStats.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for pt in self.points:
            d = pt.to_dict()
            w.writerow([_csv_cell(d[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TrialStatistics":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls([PointStats.from_dict(r) for r in rows])

    @classmethod
    def load(cls, path: str) -> "TrialStatistics":
        with open(path) as fh:
            text = fh.read()
        return cls.from_csv(text) if path.endswith(".csv") else cls.from_jsonl(text)


def default_workers() -> int:
    v = os.environ.get(WORKERS_ENV, "")
    return max(1, int(v)) if v.strip() else 1


def run_point(cfg: SweepConfig, size: int, p: float, pool: ProcessPoolExecutor | None = None) -> PointStats:
    """Run one grid point under the stop rule of ``cfg``."""
    point = cfg.point(size, p)
    key = point_key(point)
    t0 = time.perf_counter()
    code, ch, _ = _context(point)
    nblocks = -(-cfg.trials // cfg.block_size)
    wave = max(1, cfg.workers or default_workers())
    trials = failures = 0
    b = 0
    while b < nblocks:
        tasks = []
        for j in range(b, min(nblocks, b + wave)):
            shots = min(cfg.block_size, cfg.trials - j * cfg.block_size)
            tasks.append((point, cfg.seed, key, j, shots))
        results = list(pool.map(_block_task, tasks)) if pool is not None else [_block_task(t) for t in tasks]
        stop = False
        for f, n in results:
            failures += f
            trials += n
            b += 1
            if cfg.max_failures is not None and failures >= cfg.max_failures:
                stop = True
                break
        if stop:
            break
    lo, hi = wilson_interval(failures, trials)
    spec = code.lattice.spec
    seconds = time.perf_counter() - t0 if cfg.timing else 0.0
    label = f"{point['family']}-{next(iter(size_kwargs(point['family'], size)))}{size}"
    return PointStats(
        code=label,
        family=point["family"],
        d=spec.d if spec is not None else None,
        L1=spec.L1 if spec is not None else None,
        L2=spec.L2 if spec is not None else None,
        kappa="0" if code.deformation is None else format_fraction(code.deformation.kappa),
        phi="0" if code.deformation is None else format_phi(code.deformation.phi),
        eta=point["eta"],
        p=float(p),
        decoder=cfg.decoder,
        trials=trials,
        failures=failures,
        p_L=failures / trials,
        ci_lo=lo,
        ci_hi=hi,
        seed=cfg.seed,
        seconds=seconds,
    )


def iter_sweep(cfg: SweepConfig):
    """Yield :class:`PointStats` for every (size, p) point of ``cfg`` in grid order."""
    workers = cfg.workers or default_workers()
    if not cfg.p_grid or not cfg.sizes:
        return
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for size in cfg.sizes:
            for p in cfg.p_grid:
                yield run_point(cfg, size, p, pool)
    finally:
        if pool is not None:
            pool.shutdown()


def run_sweep(cfg: SweepConfig) -> TrialStatistics:
    """Run every (size, p) point of ``cfg``; results are independent of the worker count."""
    return TrialStatistics(list(iter_sweep(cfg)))
