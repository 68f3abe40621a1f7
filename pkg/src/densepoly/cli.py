"""Command-line entry point.

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from .linkstates import DomainError, SeamLayout, dimension
from .qseries import (
    character_series,
    decomposition_holds,
    finitized_characters,
    irreducible_decomposition,
    q_catalan,
    selection_prefactor,
    selection_sum,
)
from .scaling import FitError, fit_conformal, sector_sizes
from .spectra import (
    ClassificationError,
    classify_spectrum,
    generating_polynomial,
    hamiltonian_check,
)
from .tangle import QUARTER_PI, verify_boundary_proposition, verify_projector_properties
from .transfer import DEFAULT_PROBES, TransferParams, build_D, functional_checks, hamiltonian

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

DEFAULT_TOL = {
    "verify": {"inversion": 1e-9, "crossing": 1e-10, "commute": 1e-10, "init": 1e-3},
    "spectrum": {"match": 1e-8},
    "selection": {"match": 1e-8},
    "hamiltonian": {"energy": 1e-8, "commutator": 1e-9},
    "boundary": {"proposition": 1e-10, "projector": 1e-10},
    "fit": {"c": 0.05, "delta": 0.05},
}


class ConfigError(ValueError):
    """Inconsistent or missing command-line parameters."""


@dataclass
class RunConfig:
    command: str
    N_values: List[int] = field(default_factory=list)
    r: int = 1
    s: int = 1
    rho_parity: str = "odd"
    probes: List[float] = field(default_factory=list)
    xi: float = QUARTER_PI
    lam: Optional[float] = None
    order: int = 20
    tol: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "json"
    jobs: int = 1
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def rho(self) -> int:
        return 2 * self.r if self.rho_parity == "even" else 2 * self.r - 1

    def layouts(self) -> List[SeamLayout]:
        out = []
        for N in self.N_values:
            if (N + self.rho + self.s) % 2:
                raise ConfigError(f"N={N} violates N + rho + s even (rho={self.rho}, s={self.s})")
            out.append(SeamLayout(N, self.rho, self.s))
        return out

    def tolerances(self) -> Dict[str, float]:
        tols = dict(DEFAULT_TOL.get(self.command, {}))
        if self.tol is not None:
            tols = {k: self.tol for k in tols}
        return tols


def _pmap(fn: Callable, tasks: Sequence, jobs: int) -> List:
    """Map in task order; a process pool is used when more than one job is allowed."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _emit(cfg: RunConfig, payload: Any, text: Optional[str] = None, rows: Optional[List[dict]] = None) -> None:
    if cfg.fmt == "text" and text is not None:
        body = text + "\n"
    elif cfg.fmt == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        body = buf.getvalue()
    else:
        body = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


# ---------------------------------------------------------------------------
# subcommands


def cmd_dims(cfg: RunConfig) -> int:
    rows = [{"N": L.N, "rho": L.rho, "s": L.s, "dim": dimension(L)} for L in cfg.layouts()]
    text = str(rows[0]["dim"]) if len(rows) == 1 else "\n".join(f"{r['N']} {r['dim']}" for r in rows)
    _emit(cfg, rows, text, rows)
    return EXIT_OK


def _verify_one(args):
    layout, probes, xi = args
    return functional_checks(layout, probes, xi).to_dict()


def cmd_verify(cfg: RunConfig) -> int:
    tols = cfg.tolerances()
    reports = _pmap(_verify_one, [(L, cfg.probes, cfg.xi) for L in cfg.layouts()], cfg.jobs)
    ok = all(rep["checks"][k] <= tols[k] for rep in reports for k in tols if k in rep["checks"])
    rows = [dict(N=rep["sector"]["N"], rho=rep["sector"]["rho"], s=rep["sector"]["s"], **rep["checks"])
            for rep in reports]
    _emit(cfg, {"ok": ok, "tolerances": tols, "reports": reports}, rows=rows)
    return EXIT_OK if ok else EXIT_FAIL


def _spectrum_one(args):
    layout, probes, tol, xi = args
    return [r.to_dict() for r in classify_spectrum(layout, probes, tol, xi)]


def cmd_spectrum(cfg: RunConfig) -> int:
    tol = cfg.tolerances()["match"]
    layouts = cfg.layouts()
    results = _pmap(_spectrum_one, [(L, cfg.probes, tol, cfg.xi) for L in layouts], cfg.jobs)
    if len(layouts) == 1:
        payload: Any = results[0]
    else:
        payload = {"tolerances": {"match": tol},
                   "sectors": [{"sector": L.to_dict(), "records": rec} for L, rec in zip(layouts, results)]}
    rows = [dict(N=L.N, rho=L.rho, s=L.s, minus=" ".join(map(str, r["minus"])), edge=r["edge"],
                 energy=r["energy"], multiplicity=r["multiplicity"])
            for L, rec in zip(layouts, results) for r in rec]
    _emit(cfg, payload, rows=rows)
    return EXIT_OK


def _selection_one(args):
    layout, r, rho_parity, probes, tol = args
    G = generating_polynomial(classify_spectrum(layout, probes, tol))
    S = selection_sum(layout.N, layout.rho, layout.s)
    chi = finitized_characters(layout.N, r, layout.s, rho_parity)
    aligned = S.shift(selection_prefactor(layout.s))
    return {"sector": layout.to_dict(), "G": str(G), "selection_sum": str(S), "character": str(chi),
            "dimension": dimension(layout), "G_at_1": G.eval_at_1(),
            "ok": G == S and aligned == chi and G.eval_at_1() == dimension(layout)}


def cmd_selection(cfg: RunConfig) -> int:
    tol = cfg.tolerances()["match"]
    results = _pmap(_selection_one, [(L, cfg.r, cfg.rho_parity, cfg.probes, tol) for L in cfg.layouts()],
                    cfg.jobs)
    ok = all(r["ok"] for r in results)
    text = "\n".join(r["G"] if r["ok"] else f"MISMATCH N={r['sector']['N']}: G={r['G']} "
                     f"selection={r['selection_sum']}" for r in results)
    _emit(cfg, {"ok": ok, "results": results}, text, rows=[
        dict(N=r["sector"]["N"], G=r["G"], selection_sum=r["selection_sum"], ok=r["ok"]) for r in results])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qcat(cfg: RunConfig) -> int:
    M, kind = cfg.extra["M"], cfg.extra["kind"]
    C = q_catalan(M, cfg.r, kind)
    _emit(cfg, {"M": M, "r": cfg.r, "kind": kind, "polynomial": str(C), "terms": C.to_list()}, str(C))
    return EXIT_OK


def cmd_characters(cfg: RunConfig) -> int:
    chi = character_series(cfg.r, cfg.s, cfg.order)
    dec = irreducible_decomposition(cfg.r, cfg.s, cfg.order)
    holds = decomposition_holds(cfg.r, cfg.s, cfg.order)
    payload = {"r": cfg.r, "s": cfg.s, "order": cfg.order, "character": str(chi),
               "decomposition": str(dec), "decomposition_holds": holds}
    finitized = {}
    for N in cfg.N_values:
        if (N + cfg.rho + cfg.s) % 2:
            raise ConfigError(f"N={N} violates N + rho + s even (rho={cfg.rho}, s={cfg.s})")
        finitized[str(N)] = str(finitized_characters(N, cfg.r, cfg.s, cfg.rho_parity))
    if finitized:
        payload["finitized"] = finitized
    _emit(cfg, payload, str(chi))
    return EXIT_OK if holds else EXIT_FAIL


def cmd_fit(cfg: RunConfig) -> int:
    tols = cfg.tolerances()
    if len(cfg.probes) != 1:
        raise ConfigError("fit takes a single --u value")
    fit = fit_conformal((cfg.r, cfg.s, cfg.rho_parity), cfg.N_values, cfg.probes[0], cfg.extra["source"])
    summary = fit.summary()
    summary["tolerances"] = tols
    ok = abs(fit.delta_est - float(fit.delta_exact)) <= tols["delta"]
    if (cfg.r, cfg.s) == (1, 1):
        ok = ok and abs(fit.c_est + 2) <= tols["c"]
    summary["ok"] = ok
    rows = [{"N": N, "E": E, "E_minus_bulk_bdy": red, "predicted": pred}
            for N, E, red, pred in zip(fit.N_list, fit.E_list, fit.reduced(), fit.predicted())]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["N", "E", "E_minus_bulk_bdy", "predicted"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(buf.getvalue())
            sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
        else:
            sys.stdout.write(buf.getvalue() + "# " + json.dumps(summary, sort_keys=True) + "\n")
    else:
        summary["rows"] = rows
        _emit(cfg, summary)
    return EXIT_OK if ok else EXIT_FAIL


def _hamiltonian_one(args):
    layout, probes, tol, xi = args
    records = classify_spectrum(layout, probes, tol, xi)
    rep = hamiltonian_check(layout, records, xi)
    H = hamiltonian(layout, xi).entries
    comm = 0.0
    for u in probes:
        D = build_D(TransferParams(layout, u, xi)).entries
        comm = max(comm, float(np.abs(H @ D - D @ H).max()))
    return {"sector": layout.to_dict(), "energy_deviation": rep.max_deviation, "commutator": comm,
            "eigenvalues": [float(x) for x in rep.eigenvalues], "predicted": [float(x) for x in rep.predicted]}


def cmd_hamiltonian(cfg: RunConfig) -> int:
    tols = cfg.tolerances()
    results = _pmap(_hamiltonian_one, [(L, cfg.probes, 1e-8, cfg.xi) for L in cfg.layouts()], cfg.jobs)
    ok = all(r["energy_deviation"] <= tols["energy"] and r["commutator"] <= tols["commutator"] for r in results)
    rows = [dict(N=r["sector"]["N"], rho=r["sector"]["rho"], s=r["sector"]["s"],
                 energy_deviation=r["energy_deviation"], commutator=r["commutator"]) for r in results]
    _emit(cfg, {"ok": ok, "tolerances": tols, "results": results}, rows=rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_boundary(cfg: RunConfig) -> int:
    tols = cfg.tolerances()
    lam = cfg.lam if cfg.lam is not None else math.pi / 2
    rho = cfg.rho
    if rho < 2:
        raise ConfigError("boundary checks need rho >= 2")
    prop = max(verify_boundary_proposition(rho, u, cfg.xi, lam) for u in cfg.probes)
    props = {}
    for rp in range(2, rho + 1):
        for k, v in verify_projector_properties(rho, rp, lam).items():
            props[k] = max(props.get(k, 0.0), v)
    ok = prop <= tols["proposition"] and all(v <= tols["projector"] for v in props.values())
    payload = {"ok": ok, "rho": rho, "lambda": lam, "xi": cfg.xi, "u": cfg.probes,
               "proposition": prop, "projector": props, "tolerances": tols}
    _emit(cfg, payload, rows=[dict(check="proposition", deviation=prop)] +
          [dict(check=k, deviation=v) for k, v in props.items()])
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "dims": cmd_dims, "verify": cmd_verify, "spectrum": cmd_spectrum, "selection": cmd_selection,
    "qcat": cmd_qcat, "characters": cmd_characters, "fit": cmd_fit, "hamiltonian": cmd_hamiltonian,
    "boundary": cmd_boundary,
}
TEXT_DEFAULT = {"dims", "selection", "qcat"}


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="densepoly", description="Critical dense polymers on the strip.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sector=True, sizes=True):
        if sizes:
            p.add_argument("--N", type=int)
            p.add_argument("--Nmin", type=int)
            p.add_argument("--Nmax", type=int)
        p.add_argument("--r", type=int, default=1)
        if sector:
            p.add_argument("--s", type=int, default=1)
            p.add_argument("--rho-parity", choices=("even", "odd"), default="odd")
        p.add_argument("--u", type=_floats)
        p.add_argument("--xi", type=float, default=QUARTER_PI)
        p.add_argument("--order", type=int, default=20)
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv", "text"))
        p.add_argument("--jobs", type=int)

    for name in ("dims", "verify", "spectrum", "selection", "hamiltonian", "characters"):
        common(sub.add_parser(name))
    p = sub.add_parser("fit")
    common(p)
    p.add_argument("--source", choices=("pattern", "diag"), default="pattern")
    p = sub.add_parser("qcat")
    common(p, sector=False, sizes=False)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--prime", action="store_true", help="the s-even family C'")
    p = sub.add_parser("boundary")
    common(p, sizes=False)
    p.add_argument("--lambda", dest="lam", type=float)
    return parser


def _sizes(ns: argparse.Namespace, required: bool) -> List[int]:
    if getattr(ns, "N", None) is not None:
        if ns.Nmin is not None or ns.Nmax is not None:
            raise ConfigError("give either --N or --Nmin/--Nmax")
        return [ns.N]
    lo, hi = getattr(ns, "Nmin", None), getattr(ns, "Nmax", None)
    if lo is None and hi is None:
        if required:
            raise ConfigError("--N or --Nmin/--Nmax is required")
        return []
    if lo is None or hi is None or lo > hi or lo < 0:
        raise ConfigError("--Nmin and --Nmax must both be given with 0 <= Nmin <= Nmax")
    return list(range(lo, hi + 1))


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cmd = ns.command
    jobs = ns.jobs if ns.jobs is not None else int(os.environ.get("DENSEPOLY_JOBS", "1") or 1)
    if jobs < 1:
        raise ConfigError("--jobs must be positive")
    # q-Catalan polynomials extend to r <= 0; sectors need r, s >= 1
    if (ns.r < 1 and cmd != "qcat") or getattr(ns, "s", 1) < 1:
        raise ConfigError("r and s must be positive")
    cfg = RunConfig(command=cmd, r=ns.r, s=getattr(ns, "s", 1), rho_parity=getattr(ns, "rho_parity", "odd"),
                    xi=ns.xi, order=ns.order, tol=ns.tol, out=ns.out,
                    fmt=ns.format or ("text" if cmd in TEXT_DEFAULT else "json"), jobs=jobs)
    need_sizes = cmd in ("dims", "verify", "spectrum", "selection", "hamiltonian", "fit")
    N_values = _sizes(ns, need_sizes) if cmd not in ("qcat", "boundary") else []
    if cmd in ("spectrum", "selection", "hamiltonian", "verify") and ns.Nmin is not None:
        # ranges skip the sizes of the wrong parity instead of failing on them
        N_values = [N for N in N_values if (N + cfg.rho + cfg.s) % 2 == 0]
    if cmd == "fit" and ns.N is None:
        N_values = sector_sizes(cfg.r, cfg.s, cfg.rho_parity, ns.Nmax, ns.Nmin)
    if cmd == "characters" and ns.Nmin is not None:
        N_values = [N for N in N_values if (N + cfg.rho + cfg.s) % 2 == 0]
    cfg.N_values = N_values
    default_u = {"fit": [math.pi / 6], "verify": [0.17, 0.41, 0.53], "boundary": [0.3, 0.7, 1.1]}
    cfg.probes = ns.u if ns.u else list(default_u.get(cmd, DEFAULT_PROBES))
    if cmd == "qcat":
        cfg.extra = {"M": ns.M, "kind": "prime" if ns.prime else "plain"}
        if ns.M < 0:
            raise ConfigError("--M must be non-negative")
    elif cmd == "fit":
        cfg.extra = {"source": ns.source}
    elif cmd == "boundary":
        cfg.lam = ns.lam
        if ns.lam is not None and not 0 < ns.lam < math.pi:
            raise ConfigError("--lambda must lie in (0, pi)")
    return cfg


def _error(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit": code}, sort_keys=True) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, DomainError) as exc:
        return _error("config", exc, EXIT_CONFIG)
    except (ClassificationError, FitError, ArithmeticError) as exc:
        return _error(type(exc).__name__, exc, EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
