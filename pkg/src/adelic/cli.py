"""Scenario-driven command line: ``adelic <group> <command> scenario.json``.

Exit codes: 0 pass or Pullback, 2 fail or NotPullback, 3 RelativePullback,
1 for any error (including scenario diagnostics).
"""

import argparse
import json
import re
import sys

from .adelic_modules import (explicit_module, f_d_reconstruct, holim_module, is_cocartesian,
                             module_roundtrip, roundtrip_check, tensor_up)
from .complexes import Complex, free_module, from_presentation, zero_complex
from .cube import (ADELIC, BP, build_adelic_cube, build_bp_cube, check_cochain_law,
                   explicit_cube)
from .errors import AdelicError, ScenarioError
from .groebner import DEFAULT_DEGREE_CAP
from .linalg import ExactMatrix
from .local_functors import (DEFAULT_WINDOW, complete, cosupport, dim_filtration, gamma,
                             localize, support)
from .ring_core import BaseRing, expr_from_json, parse_prime
from .spectrum import Flag, SpectrumPoset
from .verifier import verify_bp_equivalence, verify_pullback

SCHEMA = "adelic-scenario/1"

COMMANDS = {
    "cube": ["build", "check-law"],
    "verify": ["pullback", "bp-equivalence"],
    "functor": ["gamma", "localize", "complete", "support", "cosupport", "filtration"],
    "module": ["tensor-up", "cocartesian", "holim", "roundtrip", "reconstruct"],
}

TOP_FIELDS = {"schema", "name", "description", "ring", "poset", "variant", "module",
              "diagram", "functor", "corrupt", "reconstruct", "commands"}
RING_FIELDS = {"kind", "semilocal", "field", "p"}
POSET_FIELDS = {"primes", "dims", "containments"}
MODULE_FIELDS = {"name", "free", "presentation", "generators", "ranks", "differentials"}
DIAGRAM_FIELDS = {"r", "vertices", "faces"}
VERTEX_FIELDS = {"at", "carrier", "module"}
FACE_FIELDS = {"from", "add", "map"}
FUNCTOR_FIELDS = {"prime", "index"}
CORRUPT_FIELDS = {"flag", "position", "sign"}
RECONSTRUCT_FIELDS = {"d"}


# --- scenario parsing ----------------------------------------------------------------------

class _Source:
    """The raw text, for mapping field names to line numbers."""

    def __init__(self, text):
        self.text = text

    def line_of(self, key, after=1):
        pat = re.compile(r'"' + re.escape(str(key)) + r'"\s*:')
        for m in pat.finditer(self.text):
            line = self.text.count("\n", 0, m.start()) + 1
            if line >= after:
                return line
        return None


def _fields(obj, allowed, path, src, required=()):
    if not isinstance(obj, dict):
        raise ScenarioError("expected an object", path, src.line_of(path.split(".")[-1]))
    for k in obj:
        if k not in allowed:
            raise ScenarioError(f"unknown field {k!r}", f"{path}.{k}" if path else k,
                                src.line_of(k))
    for k in required:
        if k not in obj:
            raise ScenarioError("missing required field", f"{path}.{k}" if path else k,
                                src.line_of(path.split(".")[-1]) if path else None)


def _entry(ring, x):
    return ring.element(x) if isinstance(x, str) else x


def _matrix(ring, rows, path, src):
    try:
        rows = [[_entry(ring, x) for x in r] for r in rows]
        return ExactMatrix.from_rows(ring.core, rows)
    except (AdelicError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad matrix: {exc}", path, src.line_of(path.split(".")[-1]))


def parse_module(ring, spec, path, src):
    _fields(spec, MODULE_FIELDS, path, src)
    core = ring.core
    name = spec.get("name", "")
    if "free" in spec:
        M = free_module(core, int(spec["free"]))
    elif "presentation" in spec:
        rows = spec["presentation"]
        if rows:
            M = from_presentation(core, _matrix(ring, rows, f"{path}.presentation", src))
        else:
            M = free_module(core, int(spec.get("generators", 0)))
    elif "ranks" in spec:
        ranks = {int(n): int(r) for n, r in spec["ranks"].items()}
        diffs = {}
        for n, rows in spec.get("differentials", {}).items():
            n = int(n)
            if not rows:
                continue
            diffs[n] = _matrix(ring, rows, f"{path}.differentials", src)
        try:
            M = Complex(core, ranks, diffs)
            M.check()
        except AdelicError as exc:
            raise ScenarioError(str(exc), f"{path}.differentials", src.line_of("differentials"))
        if not M.ranks:
            M = zero_complex(core)
    else:
        raise ScenarioError("a module needs one of free, presentation, ranks", path,
                            src.line_of(path.split(".")[-1]))
    M.name = name
    return M


def _dims(v):
    return frozenset(int(d) for d in v)


class Scenario:
    def __init__(self, data, src, overrides=None):
        overrides = overrides or {}
        _fields(data, TOP_FIELDS, "", src, ("schema", "ring"))
        if data["schema"] != SCHEMA:
            raise ScenarioError(f"unsupported schema {data['schema']!r}, expected {SCHEMA!r}",
                                "schema", src.line_of("schema"))
        self.data = data
        self.name = data.get("name", "scenario")
        _fields(data["ring"], RING_FIELDS, "ring", src, ("kind",))
        try:
            self.ring = BaseRing.from_json(data["ring"])
        except AdelicError as exc:
            raise ScenarioError(str(exc), "ring", src.line_of("ring"))
        self.variant = data.get("variant", ADELIC)
        if self.variant not in (ADELIC, BP):
            raise ScenarioError(f"variant must be {ADELIC} or {BP}", "variant",
                                src.line_of("variant"))
        self.poset = None
        pdata = data.get("poset")
        if overrides.get("poset_primes"):
            pdata = {"primes": overrides["poset_primes"]}
        if pdata is not None:
            _fields(pdata, POSET_FIELDS, "poset", src, ("primes",))
            try:
                self.poset = SpectrumPoset(self.ring, pdata["primes"], pdata.get("dims"),
                                           pdata.get("containments"))
            except AdelicError as exc:
                raise ScenarioError(str(exc), "poset", src.line_of("poset"))
        if "module" in data:
            self.module = parse_module(self.ring, data["module"], "module", src)
        else:
            self.module = free_module(self.ring.core)
            self.module.name = self.ring.name
        self.diagram = None
        if "diagram" in data:
            self.diagram = self._diagram(data["diagram"], src)
        self.functor = data.get("functor", {})
        _fields(self.functor, FUNCTOR_FIELDS, "functor", src)
        self.corrupt = data.get("corrupt")
        if self.corrupt is not None:
            _fields(self.corrupt, CORRUPT_FIELDS, "corrupt", src, ("flag", "position"))
        rec = data.get("reconstruct", {})
        _fields(rec, RECONSTRUCT_FIELDS, "reconstruct", src)
        self.reconstruct_d = rec.get("d")
        self.commands = data.get("commands", [])

    def _diagram(self, d, src):
        _fields(d, DIAGRAM_FIELDS, "diagram", src, ("r", "vertices"))
        verts = {}
        for i, v in enumerate(d["vertices"]):
            path = f"diagram.vertices[{i}]"
            _fields(v, VERTEX_FIELDS, path, src, ("at", "carrier", "module"))
            try:
                carrier = expr_from_json(v["carrier"], self.ring)
            except (AdelicError, KeyError) as exc:
                raise ScenarioError(f"bad carrier: {exc}", f"{path}.carrier", src.line_of("carrier"))
            verts[_dims(v["at"])] = (carrier, parse_module(self.ring, v["module"],
                                                           f"{path}.module", src))
        faces = {}
        from .complexes import ComplexMap
        for i, f in enumerate(d.get("faces", [])):
            path = f"diagram.faces[{i}]"
            _fields(f, FACE_FIELDS, path, src, ("from", "add"))
            S, e = _dims(f["from"]), int(f["add"])
            if S not in verts or (S | {e}) not in verts:
                raise ScenarioError("face between undeclared vertices", path, src.line_of("from"))
            A, B = verts[S][1], verts[S | {e}][1]
            comps = {int(n): _matrix(self.ring, rows, f"{path}.map", src)
                     for n, rows in f.get("map", {}).items() if rows}
            try:
                faces[(S, e)] = ComplexMap(A, B, comps)
                faces[(S, e)].check()
            except AdelicError as exc:
                raise ScenarioError(str(exc), f"{path}.map", src.line_of("map"))
        return int(d["r"]), verts, faces

    # built objects
    def need_poset(self):
        if self.poset is None:
            raise ScenarioError("this command needs a poset", "poset")
        return self.poset

    def cube(self):
        if self.diagram is not None:
            r, verts, faces = self.diagram
            return explicit_cube(self.ring, r, verts, faces, self.name, self.poset)
        build = build_bp_cube if self.variant == BP else build_adelic_cube
        C = build(self.module, self.need_poset())
        if self.corrupt is not None:
            C = C.corrupt(Flag(tuple(self.corrupt["flag"])), int(self.corrupt["position"]),
                          int(self.corrupt.get("sign", -1)))
        return C

    def adelic_module(self):
        if self.diagram is not None:
            r, verts, faces = self.diagram
            return explicit_module(self.ring, r, verts, faces, self.name, self.poset)
        return tensor_up(self.module, self.need_poset(), self.variant, check=False)

    def prime(self):
        if "prime" not in self.functor:
            raise ScenarioError("functor commands need functor.prime", "functor.prime")
        return parse_prime(self.ring, self.functor["prime"])


def load_scenario(path, overrides=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", None, exc.lineno)
    return Scenario(data, _Source(text), overrides)


# --- commands ----------------------------------------------------------------------------

def _homology_table(C, degree_cap):
    return {str(h.degree): h.to_json() for h in C.homology_all(degree_cap)} if C.ranks else {}


def run_command(group, cmd, sc, opts):
    """Returns (exit code, report dict)."""
    cap, window = opts.degree_cap, opts.stabilization_window
    head = {"scenario": sc.name, "command": f"{group} {cmd}"}

    if group == "cube":
        cube = sc.cube()
        if cmd == "build":
            return 0, {**head, "cube": cube.to_json()}
        law = check_cochain_law(cube, raise_on_failure=False)
        return (0 if law.passed else 2), {**head, "verdict": "pass" if law.passed else "fail",
                                          "law": law.to_json()}

    if group == "verify":
        if cmd == "pullback":
            rep = verify_pullback(sc.cube(), cap)
            return rep.exit_code, {**head, "verdict": rep.verdict, "report": rep.to_json()}
        rep = verify_bp_equivalence(sc.need_poset(), sc.module, cap)
        return (0 if rep.passed else 2), {**head, "verdict": "pass" if rep.passed else "fail",
                                          "report": rep.to_json()}

    if group == "functor":
        M = sc.module
        if cmd == "gamma":
            rep = gamma(sc.prime(), M)
            out = rep.to_json()
            out["cohomology"] = {f"H^{-n}": rep.describe(n) for n in sorted(rep.degrees)}
            return 0, {**head, "report": out}
        if cmd == "localize":
            p = sc.prime()
            L = localize(p, M)
            return 0, {**head, "report": {"prime": p.key, "core": repr(L.core),
                                          "homology": _homology_table(L, cap),
                                          "acyclic": L.is_acyclic(cap)}}
        if cmd == "complete":
            rep = complete(sc.prime(), M, window)
            return 0, {**head, "report": rep.to_json()}
        if cmd == "support":
            return 0, {**head, "report": support(M, sc.need_poset(), M.name or "M").to_json()}
        if cmd == "cosupport":
            rep = cosupport(M, sc.need_poset(), M.name or "M", window)
            return 0, {**head, "report": rep.to_json()}
        i = sc.functor.get("index")
        if i is None:
            raise ScenarioError("filtration needs functor.index", "functor.index")
        return 0, {**head, "report": dim_filtration(M, int(i), sc.need_poset()).to_json()}

    if group == "module":
        if cmd == "roundtrip":
            if sc.diagram is not None:
                rep = module_roundtrip(sc.adelic_module(), cap)
            else:
                rep = roundtrip_check(sc.module, sc.need_poset(), cap)
            return rep.exit_code, {**head, "verdict": rep.verdict, "report": rep.to_json()}
        X = sc.adelic_module()
        if cmd == "tensor-up":
            st = is_cocartesian(X, cap)
            return 0, {**head, "module": X.to_json(), "cocartesian": st.to_json()}
        if cmd == "cocartesian":
            st = is_cocartesian(X, cap)
            return (0 if st.cocartesian else 2), {**head, "verdict": "pass" if st.cocartesian
                                                  else "fail", "report": st.to_json()}
        if cmd == "holim":
            return 0, {**head, "report": holim_module(X, cap).to_json()}
        d = sc.reconstruct_d
        if d is None:
            raise ScenarioError("reconstruct needs reconstruct.d", "reconstruct.d")
        rep = f_d_reconstruct(X, int(d), cap)
        ok = rep.eta_d_quasi_iso and rep.cone_support_ok
        return (0 if ok else 2), {**head, "verdict": "pass" if ok else "fail",
                                  "report": rep.to_json()}
    raise AdelicError(f"unknown command {group} {cmd}")


# --- output ------------------------------------------------------------------------------

def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _text_lines(x, indent=0):
    pad = "  " * indent
    if isinstance(x, dict):
        for k in sorted(x):
            v = x[k]
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_scalar(v)}"
    elif isinstance(x, list):
        for v in x:
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}-"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}- {_scalar(v)}"
    else:
        yield f"{pad}{_scalar(x)}"


def _scalar(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if v == [] or v == {}:
        return "none"
    return str(v)


def render_text(report):
    return "\n".join(_text_lines(report)) + "\n"


def build_parser():
    ap = argparse.ArgumentParser(prog="adelic", description="Exact adelic cubes and modules.")
    ap.add_argument("--format", choices=["json", "text"], default="json")
    ap.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP,
                    help="degree bound for Groebner computations")
    ap.add_argument("--stabilization-window", type=int, default=DEFAULT_WINDOW,
                    help="tower stages that must agree before a limit is read off")
    ap.add_argument("--poset-primes", default=None,
                    help="override the scenario poset, primes separated by ';'")
    sub = ap.add_subparsers(dest="group", required=True)
    for group, cmds in COMMANDS.items():
        g = sub.add_parser(group)
        g.add_argument("command", choices=cmds)
        g.add_argument("scenario")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    overrides = {}
    if args.poset_primes:
        overrides["poset_primes"] = [p.strip() for p in args.poset_primes.split(";") if p.strip()]
    render = render_text if args.format == "text" else render_json
    try:
        sc = load_scenario(args.scenario, overrides)
        code, report = run_command(args.group, args.command, sc, args)
    except (AdelicError, ArithmeticError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ScenarioError):
            err["field"], err["line"] = exc.field, exc.line
        sys.stdout.write(render(err))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
