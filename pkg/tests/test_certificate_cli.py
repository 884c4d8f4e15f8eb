import copy
import json

import pytest

from nonabelian_roth.certificate import KEYS, verify_certificate
from nonabelian_roth.cli import main
from nonabelian_roth.counting import count_triples, max_solution_free
from nonabelian_roth.groups import cyclic, quaternion8
from nonabelian_roth.increment import run_iteration


def flip_bit(hexstr, bit=0):
    order, _, value = hexstr.partition(":")
    v = int(value, 16) ^ (1 << bit)
    return f"{order}:{v:x}"


@pytest.fixture(scope="module")
def cert_dict():
    G = cyclic(13)
    A = max_solution_free(G).best_set
    return json.loads(run_iteration(G, A).to_json())


def test_honest_certificate_passes(cert_dict):
    rep = verify_certificate(cert_dict)
    assert rep.ok, rep.to_dict()
    names = {c["check"] for c in rep.checks}
    assert {"schema", "group_hash", "config", "input", "outcomes", "uv_construction", "injection",
            "bruteforce", "replay"} <= names


@pytest.mark.parametrize("key", sorted(KEYS))
def test_every_top_level_mutation_is_rejected(cert_dict, key):
    bad = copy.deepcopy(cert_dict)
    v = bad[key]
    if isinstance(v, str) and ":" in v and key in "AUVW":
        bad[key] = flip_bit(v)
    elif isinstance(v, bool) or v is None:
        bad[key] = 1
    elif isinstance(v, int):
        bad[key] = v + 1
    elif isinstance(v, str):
        bad[key] = v + "x"
    elif isinstance(v, dict):
        bad[key] = dict(v, seed=v["seed"] + 1)
    elif isinstance(v, list):
        bad[key] = v[:-1]
    assert not verify_certificate(bad).ok


@pytest.mark.parametrize("path", [("u1", "measured", "mu_S"), ("u2", "measured", "inner"),
                                  ("u1", "witness", "a"), ("alpha_i",), ("X",)])
def test_nested_mutations_are_rejected(cert_dict, path):
    bad = copy.deepcopy(cert_dict)
    node = bad["chain"][0]
    for k in path[:-1]:
        node = node[k]
    v = node[path[-1]]
    node[path[-1]] = flip_bit(v) if isinstance(v, str) else v + (1 if isinstance(v, int) else 1e-6)
    assert not verify_certificate(bad).ok


def test_flipped_u_names_the_failing_check(cert_dict):
    bad = copy.deepcopy(cert_dict)
    bad["U"] = flip_bit(bad["U"], 1)
    rep = verify_certificate(bad)
    assert "uv_construction" in rep.failed()


def test_cli_count(capsys):
    assert main(["count", "--group", "cyclic(7)", "--subset", "0,1,3"]) == 0
    out = json.loads(capsys.readouterr().out)
    A = cyclic(7).subset([0, 1, 3])
    assert (out["total"], out["nontrivial"]) == count_triples(A)


def test_cli_catalog_csv(capsys):
    assert main(["catalog", "--max-order", "6", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,order,abelian,descriptor"
    assert any(line.startswith("S3,6,False") for line in lines)


def test_cli_search(capsys):
    assert main(["search", "--group", "Q8", "--eq", "invariant"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["best_size"] == max_solution_free(quaternion8(), "invariant").best_size


def test_cli_verify_bogolioubov(capsys):
    assert main(["verify", "bogolioubov", "--group", "dihedral(6)", "--param", "k=3", "--seed", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["certified"] is True


@pytest.mark.parametrize("lemma,params", [
    ("conjugate-intersection", ["g=3", "h=7"]),
    ("build-system", ["r=1"]),
    ("bohr-system", ["frequencies=1", "width=0.8"]),
    ("subgroup-chain", ["chain=all;2;0"]),
])
def test_cli_verify_other_lemmas(capsys, lemma, params):
    group = "C24" if lemma in ("bohr-system", "subgroup-chain") else "D6"
    argv = ["verify", lemma, "--group", group]
    for p in params:
        argv += ["--param", p]
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["certified"] is True


def test_cli_pipeline_and_check(tmp_path, capsys):
    out = tmp_path / "cert.json"
    cfg = tmp_path / "run.cfg"
    cfg.write_text("c = 1/8\nseed = 11\n")
    assert main(["pipeline", "--group", "C15", "--subset", "all", "--config", str(cfg), "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["pipeline", "--group", "C15", "--subset", "all", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_bytes() == first
    assert json.loads(first)["config"]["seed"] == 11
    assert main(["check-cert", str(out)]) == 0
    capsys.readouterr()
    data = json.loads(first)
    data["U"] = flip_bit(data["U"])
    out.write_text(json.dumps(data))
    assert main(["check-cert", str(out)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert not report["ok"] and "uv_construction" in report["failed"]


def test_cli_structured_errors(capsys):
    assert main(["pipeline", "--group", "C8", "--subset", "0,4"]) == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"] == "distinct_squares_violated"
    assert main(["count", "--group", "nonsense(3)", "--subset", "0"]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "descriptor_error"
