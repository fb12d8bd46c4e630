"""Command-line front end: compute series tables, run verification
suites, and emit machine-readable results.

Every number in the JSON output is exact (canonical strings for
polynomials and rational functions, p/q strings for rationals, never
floats).  Identical configuration yields byte-identical output.  Exit
codes: 0 success, 1 verification/cross-check failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from .cohomology import (
    GenericityError,
    GrContext,
    box_partitions,
    schur_poly,
    default_generic_alpha,
    diagonal,
    equivariant_diagonal,
    genericity_check,
    localization_data,
    pairing,
    partitions_of_degree,
    CohClass,
)
from .hyper import (
    AMatrixSpec,
    CISpec,
    a_series_evaluated,
    bar_evaluated,
    bar_transform,
    build_A,
    build_K,
    build_Y_closed,
    c_coeff,
    k_series_evaluated,
    normalization_I,
    scr_coeff,
    y_series_evaluated,
)
from .operators import (
    assemble_double_J,
    audit_frakD_normalizations,
    build_pipeline,
    orthogonality_check,
)
from .rings import RatFunc, SparsePoly
from .series import QSeries, expand_series_in_x, laurent_expand_hbar, x_coefficients
from .verifier import build_phi, check_mpc, check_recursive, check_recursive_2q, residue_internal_check



class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 3
    a: tuple[int, ...] = ()
    qdeg: int = 3
    zdeg: int = 3
    depth: int | None = None
    alpha_mode: str = "zero"  # zero | generic | explicit
    alpha: tuple | None = None
    k: int | None = None
    j: int | None = None
    kind: str | None = None
    suite: str | None = None
    mutate: tuple[int, int] | None = None
    equivariant: bool = False
    output: str | None = None

    def ci(self) -> CISpec:
        return CISpec(self.a)

    def resolve_alpha(self):
        if self.alpha_mode == "zero":
            return None
        if self.alpha_mode == "generic":
            al = default_generic_alpha(self.n)
        else:
            al = self.alpha
            if al is None or len(al) != self.n:
                raise UsageError("explicit alpha must list n values")
        genericity_check(al, self.qdeg)
        return tuple(al)

    def laurent_depth(self, kmax: int = 0) -> int:
        if self.depth is not None:
            return self.depth
        return self.n * self.qdeg + kmax + 2


def _parse_a(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as e:
        raise UsageError(f"bad -a list {text!r}") from e


def _parse_alpha(text: str):
    return tuple(Fraction(t) for t in text.split(","))


def _frac_str(v) -> str:
    v = Fraction(v)
    return str(v)


def _coeff_str(v) -> str:
    if isinstance(v, Fraction):
        return _frac_str(v)
    if isinstance(v, (RatFunc, SparsePoly)):
        return v.to_string()
    raise TypeError(f"unserializable value {type(v)}")


def _laurent_table(le) -> dict:
    return {str(e): _coeff_str(v) for e, v in sorted(le.coeffs.items(), reverse=True)}


def _series_entries(qs: QSeries) -> list:
    out = []
    for key, v in qs.terms():
        out.append({"q": list(key), "coeff": _coeff_str(v)})
    return out


def _meta(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["a"] = list(cfg.a)
    if cfg.alpha is not None:
        d["alpha"] = [str(x) for x in cfg.alpha]
    return d


def _emit(cfg: RunConfig, payload, extra=None) -> dict:
    doc = {"meta": _meta(cfg), "payload": payload}
    if extra:
        doc.update(extra)
    return doc


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def cmd_series(cfg: RunConfig) -> tuple[dict, int]:
    n, a, D = cfg.n, cfg.ci(), cfg.qdeg
    kind = cfg.kind or "dot-closed"
    code = 0
    if kind in ("dot-closed", "ddot-closed"):
        Y = build_Y_closed(kind.split("-")[0], n, a, D)
        payload = _series_entries(Y.payload)
    elif kind in ("dot-bar", "ddot-bar"):
        al = cfg.resolve_alpha()
        Y = bar_transform(build_K(kind.split("-")[0], n, a, al, D))
        payload = _series_entries(Y.payload)
    elif kind in ("dot-dual", "ddot-dual"):
        base = kind.split("-")[0]
        Ybar = bar_transform(build_K(base, n, a, None, D))
        Yclosed = build_Y_closed(base, n, a, D)
        equal = all(Ybar.coeff((d,)) == Yclosed.coeff((d,)) for d in range(D + 1))
        payload = {
            "closed": _series_entries(Yclosed.payload),
            "bar": _series_entries(Ybar.payload),
        }
        if not equal:
            code = 1
        return _emit(cfg, payload, {"equal": equal}), code
    elif kind == "i-normalization":
        I = normalization_I("dot", n, a, D)
        payload = _series_entries(I)
    elif kind in ("z-normalized", "zdd-normalized"):
        base = "dot" if kind.startswith("z-") else "ddot"
        Y = build_Y_closed(base, n, a, D)
        I = normalization_I(base, n, a, D)
        Z = Y.payload * I.inverse_unit().map_values(lambda v: RatFunc.from_scalar(v, ("x1", "x2", "h")))
        payload = _series_entries(Z)
    elif kind in ("y-gamma", "ydd-gamma"):
        if cfg.k is None or cfg.j is None:
            raise UsageError("y-gamma needs --k and --j")
        base = "dot" if kind == "y-gamma" else "ddot"
        pipe = build_pipeline(base, n, a, None, D)
        basis = partitions_of_degree(n, cfg.k)
        if not 0 <= cfg.j < len(basis):
            raise UsageError(f"--j out of range for degree {cfg.k}")
        lam = basis[cfg.j]
        ser = pipe.ygamma[lam]
        payload = []
        for key, v in ser.terms():
            entry = {"q": list(key), "coeff": _coeff_str(v)}
            cls = pipe.classes[lam][key[0]]
            entry["class"] = {
                f"{r},{jj}": _laurent_table(le) for (r, jj), le in sorted(cls.items())
            }
            payload.append(entry)
    else:
        raise UsageError(f"unknown series kind {kind!r}")
    return _emit(cfg, payload), code


def _all_pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def _y_evals(kind, n, a, al, D, mutate=None):
    out = {}
    for (i, j) in _all_pairs(n):
        if mutate is not None:
            K = k_series_evaluated(kind, n, a, al, i, j, D, mutate=mutate if (i, j) == (1, 2) else None)
            out[(i, j)] = bar_evaluated(K, al[i - 1] - al[j - 1])
        else:
            out[(i, j)] = y_series_evaluated(kind, n, a, al, i, j, D)
    return out


def _suite_recursivity(cfg: RunConfig, al) -> list[dict]:
    n, a, D = cfg.n, cfg.ci(), cfg.qdeg
    results = []
    for kind in ("dot", "ddot"):
        evals = _y_evals(kind, n, a, al, D, mutate=cfg.mutate if kind == "dot" else None)
        rep = check_recursive(
            evals, lambda s, i, j, k, d, _k=kind: c_coeff(_k, s, i, j, k, d, al, a), al, D, n
        )
        results.append({
            "check": f"recursivity-{kind}",
            "pass": rep.all_pass,
            "failures": [
                {"pair": list(e.pair), "q": list(e.degree), "note": e.note,
                 "remainder": e.remainder.to_string() if e.remainder is not None else ""}
                for e in rep.failures()
            ],
        })
    # two-variable mode on the ladder series with independent weight families
    spec = AMatrixSpec(
        n=n,
        rows=tuple((ak, ak) for ak in a.a),
        alpha1=al,
        alpha2=tuple(Fraction(11**m) for m in range(1, n + 1)),
    )
    D2 = min(D, 2)
    for kind in ("dot", "ddot"):
        evals2 = {
            (i1, i2): a_series_evaluated(kind, spec, i1, i2, D2)
            for i1 in range(1, n + 1)
            for i2 in range(1, n + 1)
        }
        rep2 = check_recursive_2q(
            evals2,
            lambda s, i1, i2, k, d, _k=kind: scr_coeff(_k, s, i1, i2, k, d, spec),
            spec.alpha1, spec.alpha2, D2, n,
        )
        results.append({
            "check": f"recursivity-2q-{kind}",
            "pass": rep2.all_pass,
            "failures": [
                {"pair": list(e.pair), "q": list(e.degree), "note": e.note}
                for e in rep2.failures()
            ],
        })
    return results


def _suite_mpc(cfg: RunConfig, al) -> list[dict]:
    n, a, D, Nz = cfg.n, cfg.ci(), cfg.qdeg, cfg.zdeg
    Fd = _y_evals("dot", n, a, al, D, mutate=cfg.mutate)
    Fdd = _y_evals("ddot", n, a, al, D)
    eta = lambda i, j: a.product * (al[i - 1] + al[j - 1]) ** a.ell
    results = []
    ok, off = check_mpc(build_phi(Fd, Fd, eta, al, n, Nz, D, "product-weight"))
    results.append({
        "check": "spc-dot", "pass": ok,
        "failures": [{"zq": list(k), "coeff": v.to_string()} for k, v in off],
    })
    ok2, off2 = check_mpc(build_phi(Fd, Fdd, lambda i, j: Fraction(1), al, n, Nz, D, "1"))
    results.append({
        "check": "mpc-dot-ddot", "pass": ok2,
        "failures": [{"zq": list(k), "coeff": v.to_string()} for k, v in off2],
    })
    return results


def _suite_operator_norms(cfg: RunConfig) -> list[dict]:
    n, a, D = cfg.n, cfg.ci(), cfg.qdeg
    results = []
    rows = (((1, 1),) if n == 3 else ((2, 1),))
    for akind in ("dot", "ddot"):
        A = build_A(akind, AMatrixSpec(n=n, rows=rows), min(D, 2))
        for p in ((1, 0), (0, 1), (1, 1), (2, 0)):
            rep = audit_frakD_normalizations(A, p)
            results.append({
                "check": f"shift-operator-tables-{akind}-p{p}",
                "pass": rep["ok"],
                "failures": [
                    {"q": list(o["q"]), "r": list(o["r"]), "s": o["s"], "got": _frac_str(o["got"])}
                    for o in rep["offenders"][:5]
                ],
            })
    for kind in ("dot", "ddot"):
        pipe = build_pipeline(kind, n, a, None, D)
        results.append({"check": f"inverse-certificates-{kind}", "pass": all(pipe.J_certified.values()), "failures": []})
        results.append({
            "check": f"structure-residual-{kind}",
            "pass": all(pipe.eqtic_residual_zero.values()),
            "failures": [],
        })
        c0 = True
        for (k, i), table in pipe.structC.items():
            for (t, (s, j)), ser in table.items():
                if t == 0:
                    want = QSeries.one(1, D) if (s, j) == (k, i) else QSeries(1, D)
                    if not ser == want:
                        c0 = False
        results.append({"check": f"structure-t0-delta-{kind}", "pass": c0, "failures": []})
    return results


def _suite_fano(cfg: RunConfig, al) -> list[dict]:
    n, a, D = cfg.n, cfg.ci(), cfg.qdeg
    if a.total > n - 2:
        raise UsageError("fano-vanishing needs |a| <= n - 2")
    K = build_K("dot", n, a, al, D, xtrunc=2 * (n - 2) + 1)
    Y = bar_transform(K)
    depth = 3
    failures = []
    for d in range(1, D + 1):
        c = Y.coeff((d,))
        for e, v in x_coefficients(c, 2 * (n - 2)).items():
            le = laurent_expand_hbar(v, depth)
            for ex in (0, -1):
                got = le.coeffs.get(ex, Fraction(0))
                if not (got == 0 if isinstance(got, Fraction) else got.is_zero()):
                    failures.append({"q": d, "x": list(e), "h_exp": ex, "coeff": _coeff_str(got)})
    return [{"check": "fano-vanishing", "pass": not failures, "failures": failures}]


def _suite_orthogonality(cfg: RunConfig) -> list[dict]:
    n, a, D = cfg.n, cfg.ci(), cfg.qdeg
    pd = build_pipeline("dot", n, a, None, D)
    pdd = build_pipeline("ddot", n, a, None, D)
    rep = orthogonality_check(pd, pdd)
    return [{
        "check": "diagonal-orthogonality",
        "pass": rep["ok"],
        "failures": [{"q": f["q"], "entry": [list(f["entry"][0]), list(f["entry"][1])]} for f in rep["failures"]],
    }]


def _suite_residue_internal(cfg: RunConfig, al) -> list[dict]:
    n, a = cfg.n, cfg.ci()
    D = min(cfg.qdeg, 2)
    Nz = min(cfg.zdeg, 2)
    Y1 = bar_transform(build_K("dot", n, a, al, D))
    Y2 = bar_transform(build_K("ddot", n, a, al, D))
    eta_poly = SparsePoly.const(("x1", "x2"), 1)
    rep = residue_internal_check(Y1, Y2, eta_poly, al, n, D, Nz, cfg.laurent_depth())
    bad = [c for c in rep["checks"] if not (c["sum_zero"] and c["regular_at_0"] and c["residue_at_0"] == 0)]
    return [{
        "check": "residue-internal",
        "pass": rep["ok"],
        "failures": [{"var": c["var"], "z": c["z"], "q": c["q"], "h_exp": c["h_exp"]} for c in bad],
    }]


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    suite = cfg.suite or "all"
    needs_alpha = suite in ("recursivity", "mpc", "fano-vanishing", "residue-internal", "all")
    al = None
    if needs_alpha:
        if cfg.alpha_mode == "zero":
            al = default_generic_alpha(cfg.n)
            genericity_check(al, cfg.qdeg)
        else:
            al = cfg.resolve_alpha()
    results = []
    if suite in ("recursivity", "all"):
        results.extend(_suite_recursivity(cfg, al))
    if suite in ("mpc", "all"):
        results.extend(_suite_mpc(cfg, al))
    if suite in ("operator-norms", "all"):
        results.extend(_suite_operator_norms(cfg))
    if suite in ("fano-vanishing",):
        results.extend(_suite_fano(cfg, al))
    if suite == "all" and cfg.ci().total <= cfg.n - 2:
        results.extend(_suite_fano(cfg, al))
    if suite in ("orthogonality", "all"):
        results.extend(_suite_orthogonality(cfg))
    if suite in ("residue-internal", "all"):
        results.extend(_suite_residue_internal(cfg, al))
    if not results:
        raise UsageError(f"unknown suite {suite!r}")
    ok = all(r["pass"] for r in results)
    return _emit(cfg, results, {"pass": ok}), (0 if ok else 1)


def cmd_cohomology(cfg: RunConfig) -> tuple[dict, int]:
    n = cfg.n
    ctx = GrContext(n)
    parts = box_partitions(n)
    basis = [{"degree": sum(lam), "partition": list(lam), "poly": schur_str(lam)} for lam in parts]
    pmat = [
        [_frac_str(pairing(CohClass({lam: Fraction(1)}), CohClass({mu: Fraction(1)}), ctx)) for mu in parts]
        for lam in parts
    ]
    diag = [
        {"left": list(lam), "right": list(mu), "coeff": _frac_str(c)}
        for (lam, mu), c in sorted(diagonal(ctx).items())
    ]
    payload = {"basis": basis, "pairing_matrix": pmat, "diagonal": diag}
    if cfg.equivariant:
        if cfg.alpha_mode == "explicit":
            al = cfg.resolve_alpha()
        else:
            al = default_generic_alpha(n)
            genericity_check(al, cfg.qdeg)
        ectx = GrContext(n, alpha=al)
        table = []
        for f in localization_data(ectx):
            table.append({
                "i": f.i, "j": f.j,
                "phi": f.phi.to_string(),
                "euler_tangent": _frac_str(f.euler_normal),
                "det_euler": _frac_str(f.det_euler),
            })
        payload["fixed_points"] = table
        payload["equivariant_diagonal"] = [
            {"left": list(lam), "right": list(mu), "coeff": _frac_str(g)}
            for (lam, mu), g in sorted(equivariant_diagonal(ectx).items())
        ]
    return _emit(cfg, payload), 0


def schur_str(lam) -> str:
    return schur_poly(lam).to_string()


def cmd_double_j(cfg: RunConfig) -> tuple[dict, int]:
    n, a, D = cfg.n, cfg.ci(), cfg.qdeg
    pd = build_pipeline("dot", n, a, None, D)
    pdd = build_pipeline("ddot", n, a, None, D)
    table = assemble_double_J(pd, pdd)
    rep = orthogonality_check(pd, pdd)
    payload = []
    for d in sorted(table):
        entries = []
        for (lam, mu), ent in sorted(table[d].items()):
            entries.append({
                "left": list(lam), "right": list(mu),
                "coeffs": {f"{e1},{e2}": _frac_str(v) for (e1, e2), v in sorted(ent.items())},
            })
        payload.append({"q": d, "tensor": entries})
    code = 0 if rep["ok"] else 1
    return _emit(cfg, payload, {"orthogonality": rep["ok"]}), code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgr", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int)
        p.add_argument("--a", type=str)
        p.add_argument("--qdeg", type=int)
        p.add_argument("--zdeg", type=int)
        p.add_argument("--alpha", type=str, help="zero | generic | comma list")
        p.add_argument("--output", type=str)
        p.add_argument("--config", type=str)

    ps = sub.add_parser("series", help="emit a series table")
    common(ps)
    ps.add_argument("--kind", type=str)
    ps.add_argument("--k", type=int)
    ps.add_argument("--j", type=int)

    pv = sub.add_parser("verify", help="run a verification suite")
    common(pv)
    pv.add_argument("--suite", type=str)
    pv.add_argument("--mutate", type=str, help="d:d1 sign flip fault injection")

    pc = sub.add_parser("cohomology", help="emit basis, pairing, diagonals")
    common(pc)
    pc.add_argument("--equivariant", action="store_true")

    py = sub.add_parser("y-gamma", help="basis-weighted series (alias of series --kind y-gamma)")
    common(py)
    py.add_argument("--k", type=int)
    py.add_argument("--j", type=int)
    py.add_argument("--kind", type=str, default="dot")

    pj = sub.add_parser("double-j", help="double-series tensor table")
    common(pj)
    return ap


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _make_config(ns: argparse.Namespace) -> RunConfig:
    file_vals = {}
    if getattr(ns, "config", None):
        file_vals = _read_config_file(ns.config)

    def pick(name, cast, default):
        v = getattr(ns, name.replace("-", "_"), None)
        if v is None:
            v = file_vals.get(name)
            if v is not None:
                v = cast(v)
        return default if v is None else v

    alpha_raw = pick("alpha", str, "zero")
    if alpha_raw in ("zero", "generic"):
        alpha_mode, alpha = alpha_raw, None
    else:
        alpha_mode, alpha = "explicit", _parse_alpha(alpha_raw)
    mutate = None
    mraw = getattr(ns, "mutate", None) or file_vals.get("mutate")
    if mraw:
        try:
            d, d1 = mraw.split(":")
            mutate = (int(d), int(d1))
        except ValueError as e:
            raise UsageError("mutate spec must be 'd:d1'") from e
    depth = None
    env_depth = os.environ.get("QGR_DEPTH")
    if env_depth:
        depth = int(env_depth)
    a_raw = getattr(ns, "a", None)
    if a_raw is None:
        a_raw = file_vals.get("a")
    cfg = RunConfig(
        command=ns.command,
        n=pick("n", int, 3),
        a=_parse_a(a_raw) if a_raw is not None else (),
        qdeg=pick("qdeg", int, 3),
        zdeg=pick("zdeg", int, 3),
        depth=depth,
        alpha_mode=alpha_mode,
        alpha=alpha,
        k=getattr(ns, "k", None),
        j=getattr(ns, "j", None),
        kind=getattr(ns, "kind", None),
        suite=getattr(ns, "suite", None),
        mutate=mutate,
        equivariant=getattr(ns, "equivariant", False),
        output=pick("output", str, None),
    )
    if cfg.n < 3:
        raise UsageError("need n >= 3")
    if cfg.qdeg < 0:
        raise UsageError("qdeg must be nonnegative")
    if sum(cfg.a) > cfg.n:
        raise UsageError("|a| must not exceed n")
    return cfg


def run(argv=None) -> int:
    ap = _build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = _make_config(ns)
        if ns.command == "series":
            doc, code = cmd_series(cfg)
        elif ns.command == "verify":
            doc, code = cmd_verify(cfg)
        elif ns.command == "cohomology":
            doc, code = cmd_cohomology(cfg)
        elif ns.command == "y-gamma":
            cfg.kind = "y-gamma" if (cfg.kind in (None, "dot")) else "ydd-gamma"
            doc, code = cmd_series(cfg)
        elif ns.command == "double-j":
            doc, code = cmd_double_j(cfg)
        else:  # pragma: no cover - argparse enforces the choices
            raise UsageError(f"unknown command {ns.command}")
    except (UsageError, GenericityError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(doc, indent=2, sort_keys=True)
    if cfg.output:
        with open(cfg.output, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())
