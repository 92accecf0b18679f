"""Command-line front end.

Exit codes: 0 on success, 2 when a mathematical check reports a violation
(ratio verdict ``Violation``, failed subspace concentration, failed lemma
or Brunn-Minkowski check), 1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bodies import GeneralPolytopeV, PolytopeH, SymmetricBody
from .bodyfile import parse_body
from .concentration import Verdict, check_scc_polytope, concentration_ratio
from .cylinder import cyl_sweep
from .errors import DualCurvError, ValidationError
from .measures import Complement, DualCurvatureQuery, FullSphere, SubspaceSphere, dual_curvature
from .quadrature import QuadratureSpec
from .subspace import make_subspace
from .unimodal import GaugePower, PowerRadial, brunn_minkowski_check, lemma_check

COMMANDS = ("measure", "ratio", "scc", "cyl-sweep", "lemma", "bm")
MIN_SAMPLES = 1000


@dataclass
class RunConfig:
    command: str
    body_path: Optional[str] = None
    q: Optional[float] = None
    subspace: list = field(default_factory=list)
    samples: int = 10**6
    seed: int = 0
    out_format: str = "json"
    out_path: Optional[str] = None
    complement: bool = False
    gauge_path: Optional[str] = None
    body2_path: Optional[str] = None
    lam: float = 0.5
    p: Optional[float] = None
    n: Optional[int] = None
    k: Optional[int] = None
    r_list: list = field(default_factory=list)
    rel_tol: float = 1e-10

    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(samples=self.samples, seed=self.seed)


def parse_subspace(text: str) -> list:
    """``"1,0,0;0,1,0"`` -> ``[[1, 0, 0], [0, 1, 0]]``."""
    try:
        return [[float(x) for x in part.split(",")] for part in text.split(";") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"--subspace: {exc}") from exc


def parse_floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"--r-list: {exc}") from exc


def _require(cfg: RunConfig, *names):
    for name in names:
        if getattr(cfg, name) in (None, []):
            flag = "body" if name == "body_path" else "--" + name.replace("_", "-")
            raise ValidationError(f"{cfg.command} needs {flag}")


def _symmetric(cfg: RunConfig) -> SymmetricBody:
    body = parse_body(cfg.body_path)
    if isinstance(body, GeneralPolytopeV):
        raise ValidationError(f"{cfg.command} needs a symmetric body, got polytope_v")
    return body


def _vertex_body(path) -> GeneralPolytopeV:
    body = parse_body(path)
    if not isinstance(body, GeneralPolytopeV):
        raise ValidationError(f"{path}: lemma and bm need a polytope_v body")
    return body


def _subspace_for(cfg: RunConfig, n: int):
    try:
        L = make_subspace(cfg.subspace)
    except (DualCurvError, ValueError) as exc:
        raise ValidationError(f"--subspace: {exc}") from exc
    if L.n != n:
        raise ValidationError(f"--subspace: vectors have {L.n} entries, body dimension is {n}")
    return L


def _check_q(q: float, n: int):
    if not 0 < q <= n:
        raise ValidationError(f"--q must lie in (0, {n}], got {q}")


def cmd_measure(cfg: RunConfig):
    _require(cfg, "body_path", "q")
    body = _symmetric(cfg)
    _check_q(cfg.q, body.n)
    region = FullSphere()
    if cfg.subspace:
        L = _subspace_for(cfg, body.n)
        region = Complement(L) if cfg.complement else SubspaceSphere(L)
    gauge = parse_body(cfg.gauge_path) if cfg.gauge_path else None
    est = dual_curvature(DualCurvatureQuery(body, cfg.q, region, gauge), cfg.spec())
    row = {"value": est.value, "std_err": est.std_err, "samples": est.samples, "seed": est.seed,
           "q": cfg.q, "n": body.n}
    return [row], 0


def cmd_ratio(cfg: RunConfig):
    _require(cfg, "body_path", "q", "subspace")
    body = _symmetric(cfg)
    _check_q(cfg.q, body.n)
    gauge = parse_body(cfg.gauge_path) if cfg.gauge_path else None
    rep = concentration_ratio(body, cfg.q, _subspace_for(cfg, body.n), cfg.spec(), gauge=gauge)
    row = rep.as_dict()
    row.pop("confirmed")
    return [row], 2 if rep.verdict is Verdict.VIOLATION else 0


def cmd_scc(cfg: RunConfig):
    _require(cfg, "body_path")
    body = _symmetric(cfg)
    if not isinstance(body, PolytopeH):
        raise ValidationError("scc needs a polytope_h body")
    rep = check_scc_polytope(body)
    rows = [{
        "dim_L": e.dim,
        "basis": ";".join(",".join(f"{x:.12g}" for x in v) for v in e.subspace.basis),
        "mass": e.mass,
        "value": e.ratio,
        "bound": e.bound,
        "equality": e.equality,
        "complement_ok": e.complement_ok,
        "verdict": "Violation" if e.ratio > e.bound + 1e-9 else ("Equality" if e.equality else "StrictPass"),
    } for e in rep.entries]
    return rows, 0 if rep.holds else 2


def cmd_cyl_sweep(cfg: RunConfig):
    _require(cfg, "n", "k", "q", "r_list")
    if not 1 <= cfg.k <= cfg.n - 1:
        raise ValidationError("--k must satisfy 1 <= k <= n-1")
    _check_q(cfg.q, cfg.n)
    try:
        table = cyl_sweep(cfg.k, cfg.n, cfg.q, cfg.r_list, cfg.rel_tol)
    except ValueError as exc:
        raise ValidationError(f"--r-list: {exc}") from exc
    return [{"r": r.r, "subspace": r.subspace, "total": r.total, "ratio": r.ratio} for r in table], 0


def _unimodal_fn(cfg: RunConfig, n: int):
    p = cfg.p if cfg.p is not None else -1.0
    if not -n < p < 0:
        raise ValidationError(f"--p must lie in ({-n}, 0), got {p}")
    if cfg.gauge_path:
        return GaugePower(parse_body(cfg.gauge_path), p)
    return PowerRadial(p, n)


def cmd_lemma(cfg: RunConfig):
    _require(cfg, "body_path")
    body = _vertex_body(cfg.body_path)
    if not 0 < cfg.lam < 1:
        raise ValidationError("--lambda must lie in (0, 1)")
    rep = lemma_check(body, cfg.lam, _unimodal_fn(cfg, body.n), cfg.spec())
    return [rep.as_dict()], 0 if rep.passed else 2


def cmd_bm(cfg: RunConfig):
    _require(cfg, "body_path", "body2_path")
    k0, k1 = _vertex_body(cfg.body_path), _vertex_body(cfg.body2_path)
    if k0.n != k1.n:
        raise ValidationError("bm bodies must share a dimension")
    if not 0 <= cfg.lam <= 1:
        raise ValidationError("--lambda must lie in [0, 1]")
    rep = brunn_minkowski_check(k0, k1, cfg.lam, cfg.spec())
    return [rep.as_dict()], 0 if rep.passed else 2


HANDLERS = {
    "measure": cmd_measure,
    "ratio": cmd_ratio,
    "scc": cmd_scc,
    "cyl-sweep": cmd_cyl_sweep,
    "lemma": cmd_lemma,
    "bm": cmd_bm,
}


def _plain(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def render(rows: list, fmt: str) -> str:
    if fmt == "json":
        doc = [{k: _plain(v) for k, v in r.items()} for r in rows]
        return json.dumps(doc[0] if len(doc) == 1 else doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0].keys()) if rows else [])
    for r in rows:
        writer.writerow(["%.12g" % v if isinstance(v, (float, np.floating)) else _plain(v) for v in r.values()])
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    """Execute one command and write its result; returns the exit code."""
    try:
        if cfg.command not in HANDLERS:
            raise ValidationError(f"unknown command {cfg.command!r}")
        if cfg.samples < MIN_SAMPLES:
            raise ValidationError(f"--samples must be at least {MIN_SAMPLES}")
        if cfg.out_format not in ("json", "csv"):
            raise ValidationError("--format must be json or csv")
        rows, code = HANDLERS[cfg.command](cfg)
        text = render(rows, cfg.out_format)
        if cfg.out_path:
            Path(cfg.out_path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return code
    except (DualCurvError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dualcurv", description="Dual curvature measures and subspace concentration checks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("body", nargs="?", help="body specification file (JSON)")
    ap.add_argument("--q", type=float)
    ap.add_argument("--subspace", type=parse_subspace, default=[], help='basis vectors, e.g. "1,0,0;0,1,0"')
    ap.add_argument("--complement", action="store_true", help="measure: use the complement of the subspace sphere")
    ap.add_argument("--gauge", help="gauge body file replacing the unit ball")
    ap.add_argument("--body2", help="second body for bm")
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.5)
    ap.add_argument("--p", type=float, help="lemma: exponent of the power function")
    ap.add_argument("--n", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--r-list", type=parse_floats, default=[])
    ap.add_argument("--rel-tol", type=float, default=1e-10)
    ap.add_argument("--format", dest="out_format", choices=("json", "csv"), default="json")
    ap.add_argument("--out")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return 1 if exc.code else 0
    cfg = RunConfig(
        command=args.command, body_path=args.body, q=args.q, subspace=args.subspace,
        samples=args.samples, seed=args.seed, out_format=args.out_format, out_path=args.out,
        complement=args.complement, gauge_path=args.gauge, body2_path=args.body2, lam=args.lam,
        p=args.p, n=args.n, k=args.k, r_list=args.r_list, rel_tol=args.rel_tol,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
