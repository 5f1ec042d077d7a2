"""Golden manifests and the fixture runner.

A fixture is a directory holding ``manifest.json``, ``cmd.txt`` (one
``cornerhom ...`` command line, run with the fixture directory as working
directory), ``expected.tsv`` (byte-exact stdout) and ``provenance.json``
(one tag per number: ``PAPER``, ``TRIVIAL`` or ``DERIVED`` with a source).
"""

from __future__ import annotations

import contextlib
import io
import json
import os
import shlex
from dataclasses import dataclass, field
from pathlib import Path

from .corners import CornerManifold, Face, product_manifold
from .errors import InputError
from .evaluator import manifest_to_dict

__all__ = ["golden_manifolds", "golden_manifest", "GOLDEN_COMMANDS", "run_golden", "write_fixtures",
           "GoldenResult"]

ASSUMPTIONS = {"rational_iso": True, "trivial_cosphere": True}
BUDGETS = {"order_window": [-2, 2], "pole_bound": 4, "q_max": 4}


def _point():
    return CornerManifold(0, {"M": Face("M", 0, {"p": {"dim": 0}})}, [], name="point")


def _interval():
    faces = {
        "M": Face("M", 0, {"e": {"dim": 1, "boundary": {"a": -1, "b": 1}}}),
        "A": Face("A", 1, {"a": {"dim": 0}}),
        "B": Face("B", 1, {"b": {"dim": 0}}),
    }
    return CornerManifold(1, faces, [("A", "M"), ("B", "M")], name="interval")


def _circle():
    return CornerManifold(1, {"M": Face("M", 0, {"v": {"dim": 0}, "e": {"dim": 1, "boundary": {}}})}, [],
                          name="circle")


def golden_manifolds() -> dict:
    I = _interval()
    sq = product_manifold(I, I, name="square")
    return {"point": _point(), "interval": I, "circle": _circle(), "square": sq,
            "cube": product_manifold(sq, I, name="cube")}


def golden_manifest(name: str, X=()) -> dict:
    M = golden_manifolds()[name]
    return manifest_to_dict(M, X=X, assumptions=dict(ASSUMPTIONS), budgets=dict(BUDGETS))


# name -> (command, provenance tags for the numbers in expected.tsv)
GOLDEN_COMMANDS = {
    "point": ("cornerhom cohomology --manifest manifest.json --route both",
              {"H^0": "DERIVED: face formula and cellular L(M) agree (one face, b0 = 1)"}),
    "interval": ("cornerhom cohomology --manifest manifest.json --route both",
                 {"H^0": "DERIVED: corners oracle", "H^1": "DERIVED: corners oracle (two endpoint hyperfaces)"}),
    "circle": ("cornerhom evaluate --manifest manifest.json --theorem hh --variant laurent",
               {"HH_0": "DERIVED: evaluator, matches the symbol-model spectral run",
                "HH_1": "DERIVED: evaluator, matches the symbol-model spectral run",
                "HH_2": "DERIVED: evaluator, matches the symbol-model spectral run"}),
    "square": ("cornerhom evaluate --manifest manifest.json --theorem traces",
               {"trace_count": "DERIVED: minimal-face scan",
                "h_top_dim": "DERIVED: cellular H^4 over the corner points",
                "asserted": "TRIVIAL: n = 2"}),
    "cube": ("cornerhom evaluate --manifest manifest.json --theorem traces",
             {"trace_count": "DERIVED: minimal-face scan",
              "h_top_dim": "DERIVED: cellular H^6 over the corner points",
              "asserted": "TRIVIAL: n = 3"}),
}


def _run(cmd: str, cwd: Path) -> tuple[int, str, str]:
    from .cli import main
    argv = shlex.split(cmd)
    if not argv or argv[0] != "cornerhom":
        raise InputError(f"fixture command must start with 'cornerhom': {cmd!r}")
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    try:
        os.chdir(cwd)
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(argv[1:])
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


@dataclass
class GoldenResult:
    name: str
    ok: bool
    diff: list = field(default_factory=list)
    exit_code: int = 0


def run_golden(suite) -> list:
    """Run every fixture under ``suite`` and compare stdout byte for byte."""
    suite = Path(suite)
    results = []
    for d in sorted(p for p in suite.iterdir() if p.is_dir()):
        for f in ("manifest.json", "cmd.txt", "expected.tsv", "provenance.json"):
            if not (d / f).exists():
                raise InputError(f"fixture {d.name} lacks {f}")
        cmd = (d / "cmd.txt").read_text(encoding="utf-8").strip()
        expected = (d / "expected.tsv").read_text(encoding="utf-8")
        code, got, _ = _run(cmd, d)
        diff = []
        if code != 0:
            diff.append(f"exit code {code}")
        el, gl = expected.splitlines(), got.splitlines()
        for i in range(max(len(el), len(gl))):
            a = el[i] if i < len(el) else "<missing>"
            b = gl[i] if i < len(gl) else "<missing>"
            if a != b:
                diff.append(f"row {i}: expected {a!r}, got {b!r}")
        if not diff and got != expected:
            diff.append("trailing bytes differ")
        results.append(GoldenResult(d.name, not diff, diff, code))
    return results


def write_fixtures(suite) -> list:
    """(Re)generate the fixture directories from the current engine output."""
    suite = Path(suite)
    written = []
    for name, (cmd, prov) in GOLDEN_COMMANDS.items():
        d = suite / name
        d.mkdir(parents=True, exist_ok=True)
        (d / "manifest.json").write_text(json.dumps(golden_manifest(name), indent=2) + "\n", encoding="utf-8")
        (d / "cmd.txt").write_text(cmd + "\n", encoding="utf-8")
        code, out, err = _run(cmd, d)
        if code != 0:
            raise InputError(f"fixture {name}: command failed with exit {code}: {err}")
        (d / "expected.tsv").write_text(out, encoding="utf-8")
        (d / "provenance.json").write_text(json.dumps({"command": cmd, "tags": prov}, indent=2) + "\n",
                                           encoding="utf-8")
        written.append(name)
    return written
