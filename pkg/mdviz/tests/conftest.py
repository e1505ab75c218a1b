"""Shared fixtures: dump/CSV corpora generated through the simulator CLI.

The plotting package is exercised only against files produced by the
``mdkit`` executable (plus hand-crafted bytes for format edge cases), so
these tests consume the simulator exclusively through its external
interfaces.
"""

from __future__ import annotations

import shutil
import subprocess
from types import SimpleNamespace

import pytest

MDKIT = shutil.which("mdkit")

# One tiny run per solver kind; together they dump complex and real fields,
# single- and multi-component, at several times (30 files in total).
RUN_CONFIGS = {
    "md": """
solver.kind = md
preset.name = exact_plane_wave
grid.n = 4
time.dt = 1/8
time.t_final = 0.25
output.dump_times = 0, 0.125, 0.25
output.stride = 1
""",
    "wkb": """
solver.kind = wkb
preset.name = steady_state
grid.n = 4
time.dt = 1/8
time.t_final = 0.25
output.dump_times = 0, 0.125, 0.25
output.stride = 1
""",
    "sp": """
solver.kind = sp
preset.name = nr_gaussian
grid.n = 8
time.dt = 1/8
time.t_final = 0.25
output.dump_times = 0.125, 0.25
output.stride = 1
""",
}


def _run(args):
    proc = subprocess.run(args, capture_output=True, text=True)
    assert proc.returncode == 0, f"{args} failed:\n{proc.stdout}\n{proc.stderr}"
    return proc


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Run the simulator once per solver kind and collect everything it wrote."""
    if MDKIT is None:
        pytest.skip("mdkit executable not on PATH")
    root = tmp_path_factory.mktemp("corpus")
    runs = {}
    dumps = []
    for label, text in RUN_CONFIGS.items():
        cfg = root / f"{label}.cfg"
        cfg.write_text(text)
        out = root / label
        _run([MDKIT, "run", "--config", str(cfg), "--output", str(out), "--threads", "1"])
        runs[label] = out
        dumps.extend(sorted(out.glob("*.mdk")))
    return SimpleNamespace(root=root, runs=runs, dumps=dumps)


@pytest.fixture(scope="session")
def sweep_csv(tmp_path_factory):
    """A real temporal-convergence CSV from the simulator's sweep subcommand."""
    if MDKIT is None:
        pytest.skip("mdkit executable not on PATH")
    out = tmp_path_factory.mktemp("sweep")
    _run(
        [
            MDKIT, "converge", "--axis", "time", "--levels", "1/8,1/16",
            "--set", "grid.n=8", "--set", "time.t_final=0.125",
            "--output", str(out), "--threads", "1",
        ]
    )
    return out / "converge_time.csv"
