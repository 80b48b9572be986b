"""Builds the extension module and exercises it from Python.

    python3 python/smoke_test.py

Set OPCALC_SKIP_BUILD=1 to reuse an existing release build.
"""

import cmath
import math
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_load():
    if not os.environ.get("OPCALC_SKIP_BUILD"):
        subprocess.run(
            ["cargo", "build", "--release", "-p", "opcalc-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
    lib_dir = ROOT / "target" / "release"
    candidates = [lib_dir / name for name in ("libopcalc_py.so", "libopcalc_py.dylib", "opcalc_py.dll")]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(f"no built library found in {lib_dir}")
    target_dir = Path(tempfile.mkdtemp(prefix="opcalc-py-"))
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy(built, target_dir / f"opcalc{suffix}")
    sys.path.insert(0, str(target_dir))
    import opcalc

    return opcalc


def close(a, b, tol):
    return abs(a - b) <= tol


def max_entry_diff(m1, m2):
    return max(abs(x - y) for r1, r2 in zip(m1, m2) for x, y in zip(r1, r2))


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def main():
    opcalc = build_and_load()
    checks = []

    def check(name, ok):
        checks.append((name, ok))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")

    diag = [[1, 0, 0], [0, 2, 0], [0, 0, 3]]
    check("schatten_norm", close(opcalc.schatten_norm(diag, 1), 6.0, 1e-12)
          and close(opcalc.schatten_norm(diag, "inf"), 3.0, 1e-12))
    check("singular_values", all(close(s, e, 1e-12) for s, e in zip(opcalc.singular_values(diag), [3, 2, 1])))

    h = [[2, 1j], [-1j, 2]]
    atoms = opcalc.spectral_atoms(h)
    check("spectral_atoms", [round(lam, 12) for lam, _ in atoms] == [1.0, 3.0])

    sq = opcalc.apply_function(lambda t: t * t, h)
    check("apply_function", max_entry_diff(sq, matmul(h, h)) < 1e-12)

    a = [[0, 1], [1, 0]]
    b = [[1, 0], [0, -1]]
    prod = opcalc.apply_function_pair(lambda x, y: x * y, a, b)
    check("apply_function_pair", max_entry_diff(prod, matmul(a, b)) < 1e-12)

    xyz = opcalc.apply_function_triple(lambda x, y, z: x * y * z, a, b, a)
    check("apply_function_triple", max_entry_diff(xyz, matmul(matmul(a, b), a)) < 1e-12)

    diff = opcalc.perturbation_via_divided_difference(lambda t: t * t, a, b)
    expected = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(matmul(a, a), matmul(b, b))]
    check("divided difference", max_entry_diff(diff, expected) < 1e-12)

    try:
        opcalc.apply_function(lambda t: 1 / 0, h)
        raised = False
    except ZeroDivisionError:
        raised = True
    check("callback errors propagate", raised)

    try:
        opcalc.schatten_norm(diag, 0.5)
        rejected = False
    except ValueError:
        rejected = True
    check("invalid p rejected", rejected)

    check("eta", opcalc.eta(0.0) == 1.0 and abs(opcalc.eta(2 * math.pi)) < 1e-14)
    check("window_w", opcalc.window_w(1.0) == 1.0 and opcalc.window_w(0.5) == 0.0)
    check("partition_check", close(opcalc.partition_check(3.0), 1.0, 1e-10))
    check("psi", opcalc.psi(0.5) == 0.5 and opcalc.psi(3.0) == 0.0)
    kappa = opcalc.tensor_bound_kappa(1.0)
    check("tensor_bound_kappa", 3.7 < kappa < 3.8)

    u = opcalc.dft_unitary(2)
    check("dft_unitary", close(u[0][0], cmath.exp(1j * math.pi) / math.sqrt(2), 1e-15))

    inst = opcalc.build_instance(4)
    check("build_instance", inst.N == 4 and close(inst.phi(2 * math.pi, 2 * math.pi), inst.theta[0][0], 1e-12))
    rec = opcalc.verify_growth(16, 2)
    check("verify_growth", rec.N == 16 and close(rec.ratio, 4.0, 4e-8))
    check("instance growth", close(inst.growth("inf").ratio, 2.0, 2e-8))

    rows = opcalc.epsilon_scaling_run([4, 16, 64, 256], 2, power=0.25)
    check("epsilon_scaling_run", all(close(r.lhs, r.perturbation * math.sqrt(r.N), 1e-8) for r in rows)
          and close(rows[-1].perturbation, 0.25, 1e-8))

    failed = [name for name, ok in checks if not ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
