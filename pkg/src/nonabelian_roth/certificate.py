"""Standalone certificate checking: every claim in a pipeline certificate is
re-derived from the group descriptor, the input set and the embedded config."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .checker import check_outcome
from .config import RunConfig
from .counting import count_triples
from .errors import RothError
from .groups import Subset, has_distinct_squares, load_group, two_sided
from .increment import (
    INCREMENT_CHAIN_EXHAUSTED,
    TRIPLE_COUNT,
    build_uvw,
    config_hash,
    run_iteration,
    verify_injection,
)
from .msys import MultiplicativeSystem, verify_system

FORMAT = "nonabelian-roth-certificate/1"
KEYS = {"format", "kind", "group", "group_order", "group_hash", "A", "config", "config_hash", "chain",
        "triples_lower_bound", "anchor", "U", "V", "W"}


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail=None):
        self.checks.append({"check": name, "passed": bool(passed), "detail": detail})

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c["passed"] for c in self.checks)

    def failed(self) -> list[str]:
        return [c["check"] for c in self.checks if not c["passed"]]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failed": self.failed(), "checks": self.checks}


def _run(report: CheckReport, name: str, fn):
    """Run one named check; any exception counts as a failure of that check."""
    try:
        res = fn()
    except (RothError, KeyError, ValueError, TypeError, IndexError, AttributeError) as exc:
        report.add(name, False, repr(exc))
        return None
    if isinstance(res, tuple):
        ok, detail = res
    else:
        ok, detail = bool(res), None
    report.add(name, ok, detail)
    return ok


def verify_certificate(cert: dict | str, replay: bool = True) -> CheckReport:
    if isinstance(cert, str):
        cert = json.loads(cert)
    rep = CheckReport()
    st = {}

    def schema():
        missing = KEYS - set(cert)
        extra = set(cert) - KEYS
        ok = not missing and not extra and cert["format"] == FORMAT \
            and cert["kind"] in (TRIPLE_COUNT, INCREMENT_CHAIN_EXHAUSTED) and isinstance(cert["chain"], list)
        return ok, {"missing": sorted(missing), "extra": sorted(extra)}

    if not _run(rep, "schema", schema):
        return rep

    def group():
        G = load_group(cert["group"])
        st["G"] = G
        return G.table_hash == cert["group_hash"] and G.order == cert["group_order"], G.table_hash

    if not _run(rep, "group_hash", group):
        return rep
    G = st["G"]

    def config():
        cfg = RunConfig.from_dict(cert["config"])
        st["cfg"] = cfg
        return config_hash(cfg) == cert["config_hash"] and cfg.to_dict() == cert["config"]

    if not _run(rep, "config", config):
        return rep
    cfg = st["cfg"]

    def inp():
        A = Subset.from_hex(G, cert["A"])
        st["A"] = A
        return A.card > 0 and has_distinct_squares(A)

    if not _run(rep, "input", inp):
        return rep
    A = st["A"]

    def systems():
        bad = []
        for rec in cert["chain"]:
            for key in ("system", "system_prime"):
                sys = MultiplicativeSystem.from_dict(G, rec[key])
                if not verify_system(sys).ok:
                    bad.append((rec["i"], key))
            Z = two_sided(rec["g"], MultiplicativeSystem.from_dict(G, rec["system"]).B(0), int(G.inv[rec["h"]]))
            if (A & Z).to_hex() != rec["A_i"]:
                bad.append((rec["i"], "A_i"))
        return not bad, bad

    _run(rep, "systems", systems)

    def outcomes():
        bad = []
        for rec in cert["chain"]:
            for key in ("u1", "u2"):
                if key in rec:
                    fails = check_outcome(G, rec[key], cfg.c_slack, cfg.tolerance)
                    if fails:
                        bad.append({"step": rec["i"], "outcome": key, "failures": fails})
        return not bad, bad

    _run(rep, "outcomes", outcomes)

    if cert["kind"] == TRIPLE_COUNT:
        def uv():
            last = cert["chain"][-1]
            anc = last["anchor"]
            a = cert["anchor"]
            A_i = Subset.from_hex(G, last["A_i"])
            U, V, W = build_uvw(A_i, a, Subset.from_hex(G, anc["B0minus"]), Subset.from_hex(G, anc["B1minus"]))
            sys_p = MultiplicativeSystem.from_dict(G, last["system_prime"])
            st["UVW"] = (U, V, W)
            ok = (anc["a"] == a == last["u1"]["witness"]["a"]
                  and anc["B0minus"] == sys_p.Bminus(0).to_hex() and anc["B1minus"] == sys_p.Bminus(1).to_hex()
                  and [s.to_hex() for s in (U, V, W)] == [cert["U"], cert["V"], cert["W"]]
                  and [anc[k] for k in "UVW"] == [cert["U"], cert["V"], cert["W"]])
            return ok

        _run(rep, "uv_construction", uv)

        def injection():
            U, V, W = (Subset.from_hex(G, cert[k]) for k in "UVW")
            n = verify_injection(A, cert["anchor"], U, V, W)
            return n == cert["triples_lower_bound"], n

        _run(rep, "injection", injection)

        def brute():
            total = count_triples(A)[0]
            return cert["triples_lower_bound"] <= total, total

        _run(rep, "bruteforce", brute)
    else:
        _run(rep, "no_count_fields", lambda: all(cert[k] is None for k in
                                                  ("triples_lower_bound", "anchor", "U", "V", "W")))

    if replay:
        def rerun():
            again = run_iteration(G, A, cfg).to_dict()
            return (json.dumps(again, sort_keys=True) == json.dumps(cert, sort_keys=True),
                    None)

        _run(rep, "replay", rerun)
    return rep


def verify_certificate_file(path: str | Path, replay: bool = True) -> CheckReport:
    return verify_certificate(Path(path).read_text(), replay)
