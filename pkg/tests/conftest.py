import textwrap
from pathlib import Path

import pytest

from callsight.driver import Mode, ScenarioConfig, run_scenario


def write_tree(root: Path, files: dict[str, str]) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    for rel, source in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(source), encoding="utf-8")
    return root


@pytest.fixture
def make_app(tmp_path):
    """Write an application tree (and optional library tree) to disk."""

    def _make(files: dict[str, str], libs: dict[str, str] | None = None):
        app = write_tree(tmp_path / "app", files)
        lib_roots: tuple[Path, ...] = ()
        if libs:
            lib_roots = (write_tree(tmp_path / "libs", libs),)
        return app, lib_roots

    return _make


@pytest.fixture
def analyze(make_app):
    """Run one scenario over an in-test source tree."""

    def _run(files, *, mode=Mode.AA, entries=(), libs=None, **kwargs):
        app, lib_roots = make_app(files, libs)
        cfg = ScenarioConfig(
            mode=mode,
            app_root=app,
            lib_roots=lib_roots,
            entries=tuple(entries),
            **kwargs,
        )
        return run_scenario(cfg)

    return _run


def edge_names(result) -> set[tuple[str, str]]:
    return result.callgraph.edge_pairs()
