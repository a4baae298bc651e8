"""Deterministic synthetic corpus generator for the desk-scale benchmark.

Produces an application of roughly 5k LOC plus ~20 library packages of
roughly 100k LOC total.  Every application function starts a call chain
that descends through one library module, so a whole-program analysis has
real inter-procedural work to do in every package.
"""

from pathlib import Path

CLASSES_PER_MODULE = 4
FUNCS_PER_MODULE = 24
MODULES_PER_LIB = 20
LIB_COUNT = 20
APP_MODULES = 10
APP_FUNCS_PER_MODULE = 50


def _lib_module(lib: str, index: int) -> str:
    lines = [f'"""Generated module {index} of {lib}."""', ""]
    for c in range(CLASSES_PER_MODULE):
        lines += [
            f"class Stage{c}:",
            "    def step(self):",
            "        return self",
            "",
            "    def run(self):",
            "        return None",
            "",
            "",
        ]
    for k in range(FUNCS_PER_MODULE):
        nxt = k + 1
        first = f"Stage{k % CLASSES_PER_MODULE}"
        second = f"Stage{(k + 1) % CLASSES_PER_MODULE}"
        lines += [
            f"def chain_{k:02d}(flag):",
            f"    h = {first}()",
            "    h.step()",
            "    if flag:",
            f"        h = {second}()",
            "    h.run()",
        ]
        if nxt < FUNCS_PER_MODULE:
            lines += [f"    return chain_{nxt:02d}(flag)", "", ""]
        else:
            lines += ["    return h", "", ""]
    lines += [
        "def api(flag):",
        "    return chain_00(flag)",
        "",
    ]
    return "\n".join(lines)


def _lib_init(lib: str) -> str:
    lines = [f'"""Package {lib}."""', ""]
    for m in range(MODULES_PER_LIB):
        lines.append(f"from .mod{m:02d} import api as api_{m:02d}")
    lines.append("")
    return "\n".join(lines)


def _app_module(index: int) -> str:
    lines = [f'"""Application part {index}."""', ""]
    libs = [f"pkg{(index * 2 + j) % LIB_COUNT:02d}" for j in range(2)]
    for lib in dict.fromkeys(libs):
        lines.append(f"import {lib}")
    lines.append("")
    lines.append("")
    for k in range(APP_FUNCS_PER_MODULE):
        lib = libs[k % len(libs)]
        mod = (index * APP_FUNCS_PER_MODULE + k) % MODULES_PER_LIB
        lines += [
            f"def task_{k:02d}():",
            "    outcome = []",
            f"    result = {lib}.api_{mod:02d}(True)",
            "    result.run()",
            "    outcome.append(result)",
            "    probe = result.step()",
            "    probe.run()",
            "    return outcome",
            "",
            "",
        ]
    return "\n".join(lines)


def generate(root: Path) -> tuple[Path, Path]:
    """Write the corpus; returns (app_root, lib_root)."""
    app_root = root / "app"
    lib_root = root / "libs"
    for i in range(LIB_COUNT):
        pkg = lib_root / f"pkg{i:02d}"
        pkg.mkdir(parents=True, exist_ok=True)
        (pkg / "__init__.py").write_text(_lib_init(f"pkg{i:02d}"), encoding="utf-8")
        for m in range(MODULES_PER_LIB):
            (pkg / f"mod{m:02d}.py").write_text(
                _lib_module(f"pkg{i:02d}", m), encoding="utf-8"
            )
    app_root.mkdir(parents=True, exist_ok=True)
    for a in range(APP_MODULES):
        (app_root / f"part{a:02d}.py").write_text(_app_module(a), encoding="utf-8")
    return app_root, lib_root


def line_count(root: Path) -> int:
    return sum(
        len(path.read_text(encoding="utf-8").splitlines())
        for path in root.rglob("*.py")
    )
