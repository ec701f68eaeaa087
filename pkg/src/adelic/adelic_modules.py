"""Modules over the cube of adelic rings.

An adelic module assigns to every vertex of the punctured cube a complex
over the vertex ring, with base-change maps along the faces.  Vertex
modules are stored as complexes over the base core tagged by their carrier
(extension of scalars along a flat carrier is retagging), so a face map is a
matrix over the base core.  Every ``tensor_up(M)`` is cocartesian, but not
conversely: the cospan Z -> Q <- Z carrying (Z/p, 0, 0) is cocartesian and
its round trip through the homotopy limit gives (Z/p, 0, Z/p).
"""

from dataclasses import dataclass, field

from .complexes import Complex, zero_complex
from .cube import (ADELIC, BP, FaceComponent, Reduction, _vsort, build_adelic_cube,
                   build_bp_cube, vertex_key)
from .errors import (CarrierMismatch, FamilyProductRemains, NotCocartesian,
                     NotRepresentable)
from .groebner import DEFAULT_DEGREE_CAP
from .linalg import invert
from .ring_core import Base, core_of
from .verifier import PULLBACK, RELATIVE, verify_pullback


def short_core(core):
    return repr(core).replace("ZZ", "Z").replace("QQ", "Q")


def describe_homology(C, degree_cap=DEFAULT_DEGREE_CAP):
    """'0', a single module string, or 'H_n = ...' pieces."""
    if C is None or not C.ranks:
        return "0"
    hs = [h for h in C.homology_all(degree_cap) if not h.zero]
    if not hs:
        return "0"

    def one(h):
        raw = h.raw
        if hasattr(raw, "free_rank"):
            R = short_core(C.core)
            parts = [R] * raw.free_rank + [f"{R.split('_')[0]}/{t}" for t in raw.torsion_strings()]
            return " + ".join(parts)
        return "nonzero (hilbert " + ",".join(map(str, raw.hilbert)) + ")"

    if len(hs) == 1 and hs[0].degree == 0:
        return one(hs[0])
    return "; ".join(f"H_{h.degree} = {one(h)}" for h in hs)


def factor_complex(f):
    """The factor's module over its carrier core (None if the carrier is symbolic)."""
    if f.symbolic:
        return None
    info = core_of(f.carrier)
    if info is None:
        return zero_complex(f.module.core)
    return f.module.base_change(info.core, f.carrier)


@dataclass
class AdelicModule:
    """Vertex modules and base-change maps over a cube of rings."""

    cube: object
    source: Complex = None
    name: str = "module"

    @property
    def ring(self):
        return self.cube.ring

    def vertices(self):
        return [S for S in self.cube.vertices if S]

    def vertex_text(self, S, degree_cap=DEFAULT_DEGREE_CAP):
        parts = []
        for f in self.cube.vertices[S]:
            C = factor_complex(f)
            parts.append("symbolic" if C is None and f.symbolic else describe_homology(C, degree_cap))
        nz = [p for p in parts if p != "0"]
        return " x ".join(nz) if nz else "0"

    def to_json(self):
        out = {"name": self.name, "cube": self.cube.to_json()}
        if self.source is not None:
            out["source"] = self.source.to_json()
        return out


def tensor_up(M, poset, variant=ADELIC, check=True):
    """1_ad (x) M: every vertex module is M over the vertex carrier."""
    cube = build_bp_cube(M, poset) if variant == BP else build_adelic_cube(M, poset)
    X = AdelicModule(cube, M, f"tensor-up({M.name or 'M'})")
    if check:
        status = is_cocartesian(X)
        if not status.cocartesian:
            raise NotCocartesian(f"tensor_up produced a non-cocartesian face: {status.faces}")
    return X


def explicit_module(ring, r, vertices, faces, name="explicit", poset=None):
    """A module over an explicit ring diagram (no augmented vertex)."""
    from .cube import explicit_cube
    verts = {S: v for S, v in vertices.items() if S}
    cube = explicit_cube(ring, r, verts, {}, name, poset)
    fc = {}
    for (S, e), f in faces.items():
        f.check()
        fc[(frozenset(S), e)] = {(0, 0): FaceComponent(f, "base change")}
    cube.faces = fc
    return AdelicModule(cube, None, name)


# --- cocartesian check --------------------------------------------------------------------

@dataclass
class FaceVerdict:
    source: str
    target: str
    factor: str
    quasi_iso: bool
    reason: str
    witness: str = ""

    def to_json(self):
        out = {"source": self.source, "target": self.target, "factor": self.factor,
               "quasi_iso": self.quasi_iso, "reason": self.reason}
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class CocartesianStatus:
    faces: list
    cocartesian: bool

    def to_json(self):
        return {"cocartesian": self.cocartesian, "faces": [f.to_json() for f in self.faces]}


def _cone_verdict(comp_maps, fb, degree_cap):
    """Is (+ components) : carrier (x) N_src -> carrier (x) N_tgt a quasi-isomorphism?"""
    if len(comp_maps) == 1:
        f = comp_maps[0]
        if f.src.ranks == f.tgt.ranks and all(invert(f.at(n)) is not None for n in f.src.ranks):
            return True, "invertible base-change matrix", ""
    if fb.symbolic:
        raise FamilyProductRemains(f"cannot test a non-invertible base change into {fb.carrier.key}")
    info = core_of(fb.carrier)
    if info is None:
        return True, "target carrier is zero", ""
    if not comp_maps:
        C = fb.module.base_change(info.core, fb.carrier)
        ok = C.is_acyclic(degree_cap)
        return ok, "no source factor maps here", "" if ok else describe_homology(C, degree_cap)
    if len(comp_maps) > 1:
        raise CarrierMismatch("several source factors meet one target factor")
    f = comp_maps[0]
    cone = f.base_change(info.core).cone()
    ok = cone.is_acyclic(degree_cap)
    if ok:
        return True, f"cone acyclic over {short_core(info.core)}", ""
    return False, f"cone not acyclic over {short_core(info.core)}", describe_homology(cone, degree_cap)


def is_cocartesian(X, degree_cap=DEFAULT_DEGREE_CAP):
    """Per face: extend scalars of the source to the target and test the cone."""
    verdicts = []
    cube = X.cube
    for (S, e) in sorted(cube.faces, key=lambda k: (_vsort(k[0] | {k[1]}), -k[1])):
        if not S:
            continue
        T = S | {e}
        comps = cube.faces[(S, e)]
        for j, fb in enumerate(cube.vertices[T]):
            maps = [c.map for (i, jj), c in sorted(comps.items()) if jj == j]
            ok, why, wit = _cone_verdict(maps, fb, degree_cap)
            verdicts.append(FaceVerdict(vertex_key(S), vertex_key(T), fb.label_text(), ok, why, wit))
    return CocartesianStatus(verdicts, all(v.quasi_iso for v in verdicts))


# --- homotopy limit and round trip ---------------------------------------------------------

@dataclass
class HolimResult:
    complex: Complex
    method: str
    certificate: list = field(default_factory=list)

    def to_json(self):
        return {"method": self.method, "homology": describe_homology(self.complex),
                "complex": self.complex.to_json(), "certificate": self.certificate}


def holim_module(X, degree_cap=DEFAULT_DEGREE_CAP):
    """The homotopy limit of the punctured diagram, as a complex over the base ring.

    Direct: totalize the punctured cube (shifted so a single vertex is its
    own limit), cancel invertible components, and require the survivors to
    live over the base ring itself.  Otherwise, for X = tensor_up(M), the
    limit is M as soon as the augmented cube verifies as a pullback.
    """
    cube = X.cube
    red = Reduction(cube.base_core, cube.vertices, cube.faces, augmented=False).run()
    try:
        C, info = red.residual()
        if C.ranks and C.carrier is not None and C.carrier.key != Base(X.ring).key:
            raise CarrierMismatch(f"the limit lives over {C.carrier.key}, not the base ring")
        if not C.ranks:
            C = zero_complex(cube.base_core)
        return HolimResult(C, "totalization", red.cancelled)
    except (FamilyProductRemains, CarrierMismatch) as exc:
        if X.source is None or cube.poset is None:
            raise NotRepresentable(f"holim is not a finite complex over the base ring: {exc}")
        rep = verify_pullback(cube, degree_cap)
        if rep.verdict != PULLBACK:
            raise NotRepresentable(f"holim not identified: verification gave {rep.verdict}")
        return HolimResult(X.source, "verified unit M -> holim",
                           [f"{r.test.key}: acyclic" for r in rep.results])


@dataclass
class RoundTripReport:
    passed: bool
    verdict: str
    original: list
    roundtrip: list
    details: dict

    @property
    def exit_code(self):
        if self.verdict == RELATIVE:
            return 3
        return 0 if self.passed else 2

    def witness_text(self):
        return "(" + ", ".join(self.roundtrip) + ")"

    def to_json(self):
        out = {"passed": self.passed, "verdict": self.verdict,
               "original": self.original, "roundtrip": self.roundtrip}
        if not self.passed:
            out["witness"] = self.witness_text()
            out["expected"] = "(" + ", ".join(self.original) + ")"
        out.update(self.details)
        return out


def roundtrip_check(M, poset, degree_cap=DEFAULT_DEGREE_CAP):
    """M -> holim(1_ad (x) M) by the verifier's tests on the augmented cube."""
    cube = build_adelic_cube(M, poset)
    rep = verify_pullback(cube, degree_cap)
    X = AdelicModule(cube, M)
    verts = [X.vertex_text(S, degree_cap) if not any(f.symbolic for f in cube.vertices[S])
             else "symbolic" for S in X.vertices()]
    return RoundTripReport(rep.verdict == PULLBACK, rep.verdict, verts, verts,
                           {"verification": rep.to_json()})


def module_roundtrip(X, degree_cap=DEFAULT_DEGREE_CAP):
    """Compare X with tensor_up(holim X) vertex by vertex (counit direction)."""
    status = is_cocartesian(X, degree_cap)
    H = holim_module(X, degree_cap)
    cube = X.cube
    orig, back, equal = [], [], True
    for S in X.vertices():
        a = X.vertex_text(S, degree_cap)
        parts = []
        for f in cube.vertices[S]:
            if f.symbolic:
                raise FamilyProductRemains("round trip of a symbolic vertex")
            info = core_of(f.carrier)
            C = H.complex.base_change(info.core, f.carrier) if info is not None else None
            parts.append(describe_homology(C, degree_cap))
        nz = [p for p in parts if p != "0"]
        b = " x ".join(nz) if nz else "0"
        orig.append(a)
        back.append(b)
        equal = equal and a == b
    details = {"cocartesian": status.to_json(), "holim": H.to_json()}
    return RoundTripReport(equal, "equal" if equal else "different", orig, back, details)


# --- the f_d reconstruction ------------------------------------------------------------------

@dataclass
class Reconstruction:
    d: int
    vertices: dict
    eta: dict
    eta_d_quasi_iso: bool
    cone_support_ok: bool
    support_checks: list
    zero_case: bool

    @property
    def passed(self):
        return self.eta_d_quasi_iso and self.cone_support_ok

    def to_json(self):
        return {"d": self.d, "zero_case": self.zero_case, "f_d": self.vertices,
                "eta": self.eta, "eta_d_quasi_iso": self.eta_d_quasi_iso,
                "cone_supported_below_d": self.cone_support_ok,
                "support_checks": self.support_checks, "passed": self.passed}


def _fd_factors(X, d, S):
    """f_d(X(d)) at S: X(S) if d_0 = d, X(d > S) if d_0 < d, nothing if d_0 > d.

    For X = tensor_up(M) every factor module is M, so extension of scalars
    along the structural maps only changes carriers.
    """
    cube = X.cube
    d0 = max(S)
    if d0 > d:
        return []
    return list(cube.vertices[S] if d0 == d else cube.vertices[S | {d}])


def _vertex_zero(factors, degree_cap):
    for f in factors:
        if f.symbolic:
            if f.module.ranks and not f.module.is_acyclic(degree_cap):
                raise NotRepresentable(f"cannot decide vanishing of the family {f.carrier.key}")
            continue
        C = factor_complex(f)
        if C is not None and C.ranks and not C.is_acyclic(degree_cap):
            return False
    return True


def _eta_text(S, d):
    d0 = max(S)
    if d0 > d:
        return "zero map"
    if d0 == d:
        return "identity" if S == frozenset({d}) else "extension of scalars of the identity at d"
    return f"structure map X({vertex_key(S)}) -> X({vertex_key(S | {d})})"


def f_d_reconstruct(X, d, degree_cap=DEFAULT_DEGREE_CAP):
    """One stage of the reconstruction: f_d(X(d)), eta, and the support of cone(eta).

    eta(d) is the identity; its cone is checked to be acyclic factor by
    factor.  For s > d, f_d(X(d))(s) = 0 so cone(eta)(s) is X(s) shifted,
    and supported-below-d means X(s) is zero there.
    """
    status = is_cocartesian(X, degree_cap)
    if not status.cocartesian:
        raise NotCocartesian("f_d needs a cocartesian module")
    if X.source is None:
        raise NotRepresentable("f_d is implemented for modules of the form tensor_up(M)")
    if d not in X.cube.dims:
        raise NotRepresentable(f"no vertex of dimension {d}")
    verts, eta = {}, {}
    for S in X.vertices():
        fd = _fd_factors(X, d, S)
        verts[vertex_key(S)] = [f"{f.carrier.key} (x) {X.source.name or 'M'}" for f in fd] or ["0"]
        eta[vertex_key(S)] = _eta_text(S, d)
    Xd = X.cube.vertices[frozenset({d})]
    eta_ok = True
    for f in Xd:
        C = factor_complex(f)
        if C is not None and not C.identity().is_quasi_isomorphism(degree_cap):
            eta_ok = False
    checks, ok = [], True
    for s in sorted(X.cube.dims, reverse=True):
        if s < d:
            continue
        if s == d:
            checks.append({"dim": s, "cone_zero": eta_ok, "reason": "eta(d) is the identity"})
            continue
        z = _vertex_zero(X.cube.vertices[frozenset({s})], degree_cap)
        checks.append({"dim": s, "cone_zero": z,
                       "reason": "f_d vanishes here, cone is X(s)[1]"})
        ok = ok and z
    zero_case = _vertex_zero(Xd, degree_cap)
    return Reconstruction(d, verts, eta, eta_ok, ok, checks, zero_case)


def reconstruction_start(X, degree_cap=DEFAULT_DEGREE_CAP):
    """The largest d with X(d) nonzero: the first stage of the induction (-1 if X ~ 0)."""
    for s in sorted(X.cube.dims, reverse=True):
        if not _vertex_zero(X.cube.vertices[frozenset({s})], degree_cap):
            return s
    return -1


__all__ = ["AdelicModule", "CocartesianStatus", "FaceVerdict", "HolimResult",
           "Reconstruction", "RoundTripReport", "describe_homology", "explicit_module",
           "f_d_reconstruct", "holim_module", "is_cocartesian", "module_roundtrip",
           "reconstruction_start", "roundtrip_check", "tensor_up"]
