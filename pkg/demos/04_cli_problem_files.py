"""Driving the same analyses through the command-line front end.

Writes a problem file for the Klein-Gordon field, runs every subcommand
on it, and shows the exit-code contract: 0 for a clean result, 1 when
the analysis itself comes back negative, 2 for malformed input.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

PROBLEM = """\
schema = 1
formalism = "lagrangian"
m = 2
n = 1
expression = "1/2*(v1_1^2 - v1_2^2) - 1/2*y1^2"
parameters = { k1 = 1.25, k2 = 0.75 }

[section]
y1 = "cos(k1*x1 - k2*x2)"

[section.axes]
n = 65
h = 0.015625
"""


def run(*argv):
    cmd = [sys.executable, "-m", "jetfield.cli", *argv]
    print("$ jetfield " + " ".join(argv))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    for line in (proc.stdout + proc.stderr).splitlines():
        print("  " + line)
    print("  -> exit code", proc.returncode, "\n")


with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "kg.toml"
    path.write_text(PROBLEM)

    run("analyze", str(path))
    run("solve", str(path))
    # the zero member of the family is curved, so this exits 1
    run("curvature", str(path))
    run("legendre", str(path), "--check-fl")
    run("verify", str(path), "--tol", "1e-4")

    bad = Path(tmp) / "bad.toml"
    bad.write_text("schema = 7\n")
    run("analyze", str(bad))
