import json
from pathlib import Path

import pytest

from adelic.adelic_modules import (describe_homology, f_d_reconstruct, holim_module,
                                   is_cocartesian, module_roundtrip, reconstruction_start,
                                   roundtrip_check, tensor_up)
from adelic.cli import load_scenario
from adelic.complexes import free_module, from_presentation
from adelic.cube import vertex_key
from adelic.errors import NotCocartesian, NotRepresentable

from conftest import cyclic

SCEN = Path(__file__).resolve().parent.parent / "scenarios"


def cospan(tmp_path, top_map):
    """Z -> Q <- Z carrying (Z, Q, Z) with the face out of vertex 1 given by ``top_map``."""
    free = {"free": 1}
    data = {
        "schema": "adelic-scenario/1", "name": "cospan", "ring": {"kind": "Integers"},
        "diagram": {"r": 1, "vertices": [
            {"at": [1], "carrier": {"node": "Base"}, "module": free},
            {"at": [1, 0], "carrier": {"node": "Localize", "at": [], "child": {"node": "Base"}},
             "module": free},
            {"at": [0], "carrier": {"node": "Base"}, "module": free}],
            "faces": [{"from": [1], "add": 0, "map": {"0": [[top_map]]}},
                      {"from": [0], "add": 1, "map": {"0": [[1]]}}]}}
    p = tmp_path / "cospan.json"
    p.write_text(json.dumps(data))
    return load_scenario(p).adelic_module()


def test_tensor_up_z2_vertices(Z, hasse_poset):
    X = tensor_up(cyclic(Z.core, 2), hasse_poset)
    texts = {vertex_key(S): X.vertex_text(S) for S in X.vertices()}
    assert texts["1"] == "0"
    assert is_cocartesian(X).cocartesian


def test_tensor_up_is_cocartesian_kxy(kxy, chain_poset):
    assert is_cocartesian(tensor_up(free_module(kxy.core), chain_poset, check=False)).cocartesian


def test_cospan_identity_is_cocartesian(tmp_path):
    assert is_cocartesian(cospan(tmp_path, 1)).cocartesian


@pytest.mark.parametrize("c", [0, 2])
def test_cospan_bad_base_change(tmp_path, c):
    # multiplication by 2 is invertible over Q, so only 0 breaks the face
    status = is_cocartesian(cospan(tmp_path, c))
    assert status.cocartesian == (c != 0)


def test_holim_of_tensor_up(Z, hasse_poset):
    H = holim_module(tensor_up(cyclic(Z.core, 2), hasse_poset))
    assert describe_homology(H.complex) == "Z/2"


def test_cocartesian_cospan_fails_roundtrip():
    X = load_scenario(SCEN / "remark85.json").adelic_module()
    assert is_cocartesian(X).cocartesian
    assert describe_homology(holim_module(X).complex) == "Z/5"
    rep = module_roundtrip(X)
    assert not rep.passed and rep.exit_code == 2
    assert rep.original == ["Z/5", "0", "0"]
    assert rep.witness_text() == "(Z/5, 0, Z/5)"


@pytest.mark.parametrize("pres", [[[0]], [[4]], [[0], [2]]])
def test_roundtrip_semilocal(semilocal23, pres):
    R, P = semilocal23
    rep = roundtrip_check(from_presentation(R.core, pres), P)
    assert rep.passed and rep.exit_code == 0


def test_f_d_free_module(semilocal23):
    R, P = semilocal23
    X = tensor_up(free_module(R.core), P)
    assert reconstruction_start(X) == 1
    top = f_d_reconstruct(X, 1)
    assert top.passed and not top.zero_case
    # below the start X(1) = Q is nonzero, so the cone is not supported in dim 0
    assert not f_d_reconstruct(X, 0).cone_support_ok


def test_f_d_torsion_module(semilocal23):
    R, P = semilocal23
    X = tensor_up(cyclic(R.core, 4), P)
    assert reconstruction_start(X) == 0
    assert f_d_reconstruct(X, 0).passed
    assert f_d_reconstruct(X, 1).zero_case


def test_f_d_rejects_explicit_modules():
    X = load_scenario(SCEN / "remark85.json").adelic_module()
    with pytest.raises(NotRepresentable):
        f_d_reconstruct(X, 1)


def test_f_d_rejects_non_cocartesian(tmp_path):
    with pytest.raises(NotCocartesian):
        f_d_reconstruct(cospan(tmp_path, 0), 1)
