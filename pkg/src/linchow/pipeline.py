"""End-to-end homology run for one prime.

Stages, in order (a stage limit stops after the named one):

  enumerate3  admissible degree-3 cycles (the generators)
  kernel      combinations of them with vanishing boundary in C^2(F_p, 2)
  enumerate4  admissible degree-4 cycles and their boundaries (sharded, checkpointed)
  quotient    relation matrix, rewrites, dedup, elementary divisors
  image       subgroup of the quotient generated by the kernel

Checkpoint directory layout (format 1):

  manifest.json   code version, p, conventions, shard bounds
  progress.json   finished shards with the sha256 of their files
  shards/NNNN.npz triples, offsets, ids, coefs of one enumerate4 shard
  status.txt      human-readable progress
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .boundary import PointClassScheme, boundary3, grassmannian_kernel
from .cycles import Cycle3, enumerate3
from .exactla import AbelianGroupStructure, RowLattice, quotient_structure, relative_kernel_basis
from .gf import FieldConfig
from .rewrite import RewriteConfig, plan_rewrites

CODE_VERSION = f"{__version__}+ckpt1"
STAGES = ("enumerate3", "kernel", "enumerate4", "quotient", "image")
CHECKPOINT_FORMAT = 1

# Reference values, compared in every report.
REFERENCE = {
    "cycles3": {2: 8, 3: 64, 5: 2120, 7: 18260, 11: 530496},
    "cycles4": {3: 106845},
    "relations": {2: 163, 3: 13481},
    "quotient_trivial": {2: True, 3: True},
}

LIST_CYCLES_UP_TO = 100


class CheckpointError(RuntimeError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CorruptCheckpointError(CheckpointError):
    pass


@dataclass
class RunConfig:
    p: int
    threads: int = 1
    scheme: PointClassScheme = PointClassScheme.FULLQUOTIENT
    rewrite: RewriteConfig = field(default_factory=RewriteConfig)
    checkpoint_dir: str | None = None
    output: str | None = None
    stage_limit: str | None = None
    keep_empty_boundary: bool = False

    def __post_init__(self):
        FieldConfig(self.p)
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.stage_limit is not None and self.stage_limit not in STAGES:
            raise ValueError(f"unknown stage {self.stage_limit!r}; choose from {', '.join(STAGES)}")
        self.scheme = PointClassScheme(self.scheme)

    def stages(self) -> tuple:
        if self.stage_limit is None:
            return STAGES
        return STAGES[: STAGES.index(self.stage_limit) + 1]

    def conventions(self) -> dict:
        """Every switch that can change a reported number."""
        return {
            "scheme": self.scheme.name,
            "rewrite": self.rewrite.describe(),
            "stage_limit": self.stage_limit,
            "degree4_faces": "lines+exceptional",
            "degree4_constants": "canonical",
            "degree4_degeneracy": "pencil",
            "degree4_keep_empty_boundary": self.keep_empty_boundary,
            "points_with_coordinate_1": "dropped",
            "constant_leftmost_faces": "dropped",
        }


@dataclass
class HomologyReport:
    p: int
    code_version: str
    conventions: dict
    stages: list
    counts: dict = field(default_factory=dict)
    cycles3: list = field(default_factory=list)
    boundary3_zero: bool | None = None
    kernel_rank: int | None = None
    kernel_basis: list = field(default_factory=list)
    elementary_divisors: list = field(default_factory=list)
    quotient: AbelianGroupStructure | None = None
    image: AbelianGroupStructure | None = None
    rewrites: dict = field(default_factory=dict)
    comparison: list = field(default_factory=list)
    conclusion: str = ""
    timings: dict = field(default_factory=dict)

    def payload(self) -> dict:
        """Report content without timings; byte-stable for a given config."""
        d = self.to_dict()
        d.pop("timings")
        return d

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("quotient", "image"):
            g = getattr(self, k)
            d[k] = None if g is None else g.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HomologyReport":
        d = dict(d)
        for k in ("quotient", "image"):
            g = d.get(k)
            d[k] = None if g is None else AbelianGroupStructure(g["free_rank"], tuple(g["invariant_factors"]))
        return cls(**d)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json_atomic(path: Path, obj):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, indent=1, sort_keys=True))
    os.replace(tmp, path)


class Checkpoint:
    """Shard store for the enumerate4 stage."""

    def __init__(self, root, p: int, conventions: dict, bounds: list):
        self.root = Path(root)
        self.p = p
        self.bounds = bounds
        self.manifest = {
            "format": CHECKPOINT_FORMAT,
            "code_version": CODE_VERSION,
            "p": p,
            "conventions": {k: conventions[k] for k in sorted(conventions) if k.startswith("degree4")},
            "shard_bounds": bounds,
        }
        self.shard_dir = self.root / "shards"
        self.done = {}

    def open(self):
        self.root.mkdir(parents=True, exist_ok=True)
        self.shard_dir.mkdir(exist_ok=True)
        mpath = self.root / "manifest.json"
        if mpath.exists():
            try:
                old = json.loads(mpath.read_text())
            except (OSError, ValueError) as e:
                raise CorruptCheckpointError(f"{mpath}: unreadable manifest ({e})") from e
            if old.get("code_version") != CODE_VERSION or old.get("format") != CHECKPOINT_FORMAT:
                raise CheckpointVersionError(
                    f"{self.root} was written by code version {old.get('code_version')!r}, this is {CODE_VERSION!r}; "
                    "refusing to resume (use a fresh checkpoint directory)"
                )
            for key in ("p", "conventions", "shard_bounds"):
                if old.get(key) != json.loads(json.dumps(self.manifest[key])):
                    raise CheckpointError(f"{self.root}: checkpoint {key} differs from this run")
        else:
            _write_json_atomic(mpath, self.manifest)
        ppath = self.root / "progress.json"
        if ppath.exists():
            try:
                self.done = {int(k): v for k, v in json.loads(ppath.read_text())["done"].items()}
            except (OSError, ValueError, KeyError) as e:
                raise CorruptCheckpointError(f"{ppath}: unreadable progress file ({e})") from e
        return self

    def shard_path(self, k: int) -> Path:
        return self.shard_dir / f"{k:04d}.npz"

    def load(self, k: int):
        from ._fast4 import ShardResult

        path = self.shard_path(k)
        if not path.exists():
            raise CorruptCheckpointError(f"{path}: listed as finished but missing")
        if _sha256(path) != self.done[k]:
            raise CorruptCheckpointError(f"{path}: checksum mismatch, the shard file was modified or truncated")
        try:
            with np.load(path) as z:
                return ShardResult(k, z["triples"], z["offsets"], z["ids"], z["coefs"])
        except (OSError, ValueError, KeyError) as e:
            raise CorruptCheckpointError(f"{path}: cannot read shard ({e})") from e

    def store(self, res):
        path = self.shard_path(res.index)
        buf = io.BytesIO()
        np.savez(buf, triples=res.triples, offsets=res.offsets, ids=res.ids, coefs=res.coefs)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(buf.getvalue())
        os.replace(tmp, path)
        self.done[res.index] = _sha256(path)
        _write_json_atomic(self.root / "progress.json", {"done": {str(k): v for k, v in sorted(self.done.items())}})

    def write_status(self, text: str):
        (self.root / "status.txt").write_text(text)


def _structure_text(g: AbelianGroupStructure | None) -> str:
    return "not computed" if g is None else str(g)


def run_homology(cfg: RunConfig, progress: Callable[[str, dict], None] | None = None) -> HomologyReport:
    """Run the stages of cfg; progress(stage, info) is called along the way
    (after each finished enumerate4 shard with info["shard"])."""
    from . import _fast4

    p = cfg.p
    stages = cfg.stages()
    rep = HomologyReport(p=p, code_version=CODE_VERSION, conventions=cfg.conventions(), stages=list(stages))
    note = progress or (lambda stage, info: None)

    t0 = time.perf_counter()
    e3idx = enumerate3(p, threads=cfg.threads, as_indices=True)
    from .universe import get_universe

    U = get_universe(p)
    cycles = [Cycle3(U.funcs[i], U.funcs[j]) for i, j in e3idx.tolist()]
    n = len(cycles)
    rep.counts["cycles3"] = n
    if n <= LIST_CYCLES_UP_TO:
        rep.cycles3 = [c.encode() for c in cycles]
    rep.timings["enumerate3"] = time.perf_counter() - t0
    note("enumerate3", {"cycles": n})

    kernel = None
    if "kernel" in stages:
        t0 = time.perf_counter()
        rep.boundary3_zero = all(not boundary3(c) for c in cycles)
        kernel = grassmannian_kernel(cycles, cfg.scheme, p)
        rep.kernel_rank = len(kernel)
        if n <= LIST_CYCLES_UP_TO:
            rep.kernel_basis = kernel
        rep.timings["kernel"] = time.perf_counter() - t0
        note("kernel", {"rank": len(kernel)})

    rows = None
    if "enumerate4" in stages:
        t0 = time.perf_counter()
        T = _fast4.get_tables(p)
        bounds = T.shard_bounds()
        ck = None
        if cfg.checkpoint_dir:
            ck = Checkpoint(cfg.checkpoint_dir, p, rep.conventions, bounds).open()
        e3ids = e3idx[:, 0].astype(np.int64) * T.usize + e3idx[:, 1]
        results = {}
        if ck:
            for k in sorted(ck.done):
                results[k] = ck.load(k)
        n_adm = n_nonempty = 0
        t_sweep = time.perf_counter()
        for res in _fast4.iter_shards(T, threads=cfg.threads, skip=set(results), bounds=bounds):
            if ck:
                ck.store(res)
            results[res.index] = res
            if ck:
                done = len(results)
                rate = sum(len(r.triples) for r in results.values()) / max(time.perf_counter() - t_sweep, 1e-9)
                ck.write_status(f"stage enumerate4\nshards {done}/{len(bounds)}\ncycles/s {rate:.0f}\n")
            note("enumerate4", {"shard": res.index, "done": len(results), "total": len(bounds)})
        # relation rows in shard order; first occurrence wins
        uniq = {}
        for k in range(len(bounds)):
            res = results[k]
            n_adm += len(res.triples)
            cols = np.searchsorted(e3ids, res.ids)
            if len(cols) and (cols.max() >= len(e3ids) or not np.array_equal(e3ids[cols], res.ids)):
                raise RuntimeError("a boundary term is not among the admissible degree-3 cycles")
            off = res.offsets.tolist()
            cl, cf = cols.tolist(), res.coefs.tolist()
            for i in range(len(res.triples)):
                a, b = off[i], off[i + 1]
                if a == b:
                    continue
                n_nonempty += 1
                uniq.setdefault(tuple(zip(cl[a:b], cf[a:b])), None)
        rows = list(uniq)
        rep.counts["cycles4_admissible"] = n_adm
        rep.counts["cycles4"] = n_adm if cfg.keep_empty_boundary else n_nonempty
        rep.counts["cycles4_nonzero_boundary"] = n_nonempty
        rep.counts["relations_distinct"] = len(rows)
        rep.counts["relations_single_term"] = sum(1 for r in rows if len(r) == 1 and abs(r[0][1]) == 1)
        rep.timings["enumerate4"] = time.perf_counter() - t0
        if ck:
            ck.write_status(f"stage enumerate4 complete\nshards {len(bounds)}/{len(bounds)}\n")

    lattice = None
    merged_map = None
    if "quotient" in stages:
        t0 = time.perf_counter()
        raw = RowLattice(n)
        for r in rows:
            raw.add_sparse(dict(r))
        plan = plan_rewrites(cycles, cfg.rewrite, raw)
        rep.rewrites = {"applied": plan.counts, "audit": plan.audit_lines()}
        # merge columns, add rule rows, drop repeats
        rep_of = {}
        for c in range(n):
            rep_of[c] = plan.column_map.get(c, (c, 1))
        kept = sorted({t for t, _ in rep_of.values()})
        pos = {c: i for i, c in enumerate(kept)}
        merged_map = {c: (pos[t], s) for c, (t, s) in rep_of.items()}
        final = {}
        for r in list(rows) + [tuple(sorted(x.items())) for x in plan.extra_rows]:
            d = {}
            for c, v in r:
                t, s = merged_map[c]
                d[t] = d.get(t, 0) + s * v
            key = tuple(sorted((c, v) for c, v in d.items() if v))
            if key:
                final.setdefault(key, None)
        lattice = RowLattice(len(kept))
        for r in final:
            lattice.add_sparse(dict(r))
        divs = lattice.elementary_divisors()
        rep.counts["columns"] = len(kept)
        rep.counts["relations"] = len(final)
        rep.elementary_divisors = divs
        rep.quotient = quotient_structure(len(kept), lattice)
        rep.timings["quotient"] = time.perf_counter() - t0

    if "image" in stages and kernel is not None and lattice is not None:
        t0 = time.perf_counter()
        gens = []
        for v in kernel:
            d = {}
            for c, x in enumerate(v):
                if x:
                    t, s = merged_map[c]
                    d[t] = d.get(t, 0) + s * x
            gens.append(d)
        rel = relative_kernel_basis(gens, lattice, lattice.n)
        dense = [[u.get(i, 0) for i in range(len(gens))] for u in rel]
        rep.image = quotient_structure(len(gens), dense)
        rep.timings["image"] = time.perf_counter() - t0

    rep.comparison = _compare(rep)
    rep.conclusion = _conclusion(rep)
    if cfg.output:
        fmt = "text" if str(cfg.output).endswith(".txt") else "json"
        emit_report(rep, fmt, cfg.output)
    return rep


def _compare(rep: HomologyReport) -> list:
    out = []
    p = rep.p
    for name, key in (("cycles3", "cycles3"), ("cycles4", "cycles4"), ("relations", "relations_distinct")):
        ref = REFERENCE[name].get(p)
        got = rep.counts.get(key)
        if ref is not None and got is not None:
            out.append({"quantity": name, "reference": ref, "obtained": got, "match": ref == got})
    ref = REFERENCE["quotient_trivial"].get(p)
    if ref is not None and rep.quotient is not None:
        out.append({"quantity": "quotient_trivial", "reference": ref, "obtained": rep.quotient.is_trivial,
                    "match": ref == rep.quotient.is_trivial})
    return out


def _conclusion(rep: HomologyReport) -> str:
    if rep.image is None:
        return "image not computed (stage limit)"
    if rep.image.is_trivial:
        return f"the image of the Grassmannian cycles in CH^2(F_{rep.p},3) vanishes"
    return f"the image of the Grassmannian cycles in CH^2(F_{rep.p},3) is {rep.image}, not zero"


def render_text(rep: HomologyReport) -> str:
    from .gf import get_field

    F = get_field(rep.p)
    lines = [f"Fractional linear cycles over F_{rep.p}  (code {rep.code_version})"]
    c = rep.counts
    lines.append(f"admissible non-degenerate cycles in C^2(F_{rep.p},3): {c.get('cycles3')}")
    for enc in rep.cycles3:
        lines.append(f"  {Cycle3.decode(enc, F).pretty():40s} {enc}")
    if rep.kernel_rank is not None:
        lines.append(f"boundary3 identically zero: {rep.boundary3_zero}")
        lines.append(f"Grassmannian kernel rank ({rep.conventions['scheme']}): {rep.kernel_rank}")
    if "cycles4_admissible" in c:
        lines.append(
            f"admissible non-degenerate cycles in C^2(F_{rep.p},4): {c['cycles4_admissible']}"
            f" ({c['cycles4_nonzero_boundary']} with nonzero boundary)"
        )
        lines.append(f"distinct relations: {c['relations_distinct']} ({c['relations_single_term']} single-term)")
    if rep.quotient is not None:
        lines.append(f"relation matrix after rewrites: {c['relations']} x {c['columns']}")
        ones = sum(1 for d in rep.elementary_divisors if d == 1)
        rest = [d for d in rep.elementary_divisors if d != 1]
        lines.append(f"elementary divisors: [1, ..., 1] {ones} times" + (f" and {rest}" if rest else ""))
        lines.append(f"quotient C^2(F_{rep.p},3)/d C^2(F_{rep.p},4): {_structure_text(rep.quotient)}")
    if rep.image is not None:
        lines.append(f"image of the Grassmannian kernel: {_structure_text(rep.image)}")
    for row in rep.comparison:
        mark = "match" if row["match"] else "DIFFERS"
        lines.append(f"reference {row['quantity']}: {row['reference']}  obtained: {row['obtained']}  [{mark}]")
    lines.append(f"conclusion: {rep.conclusion}")
    lines.append("conventions: " + json.dumps(rep.conventions, sort_keys=True))
    return "\n".join(lines) + "\n"


def emit_report(rep: HomologyReport, fmt: str = "json", path=None) -> str:
    if fmt == "json":
        text = json.dumps(rep.to_dict(), indent=1, sort_keys=True) + "\n"
    elif fmt == "text":
        text = render_text(rep)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_report(text: str) -> HomologyReport:
    return HomologyReport.from_dict(json.loads(text))


def payload_bytes(rep: HomologyReport) -> bytes:
    return json.dumps(rep.payload(), sort_keys=True).encode()
