"""Smoke test for the grkhs extension module.

Build and run from the workspace root:

    cargo build --release -p grkhs-py --features extension-module
    cp target/release/libgrkhs_py.so crates/python/python/grkhs.so
    python3 crates/python/python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import grkhs  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol * max(abs(b), 1e-300)


def main():
    omega = (3 - math.sqrt(5)) / 2

    s = grkhs.UnivariateSpectrum(1.0)
    assert close(s.omega, omega, 1e-15)
    assert close(s.eigenvalue(2) / s.eigenvalue(1), omega, 1e-14)
    assert close(sum(s.eigenvalues(2000)), 1.0, 1e-12)

    ny = grkhs.nystrom_eigs(1.0, 200, 5)
    assert all(close(a, b, 1e-6) for a, b in zip(ny, s.eigenvalues(5)))

    assert close(grkhs.kernel_eval("iso:1", [0.3, -0.2], [0.3, -0.2]), 1.0, 1e-15)
    assert grkhs.shape_parameters("powerlaw:1:2", 3) == [1.0, 0.25, 1.0 / 9.0]

    top = grkhs.top_eigenvalues("explicit:1,0.5,0.25", 3, 4)
    assert top[0][1] == [1, 1, 1]
    assert all(a[0] >= b[0] for a, b in zip(top, top[1:]))

    seq = grkhs.error_sequence("iso:1", 1, 20)
    for n, e in enumerate(seq):
        assert close(e, math.sqrt(1 - omega) * omega ** (n / 2), 1e-12)
    assert close(grkhs.initial_error("iso:1", 1), seq[0], 1e-15)
    assert close(grkhs.minimal_error("iso:1", 1, 7), seq[7], 1e-15)

    assert grkhs.info_complexity("iso:1", 1, 0.1) == 5
    assert grkhs.info_complexity("iso:1", 1, 0.9) == 0
    assert close(grkhs.quasipoly_exponent(1.0), 2.0780869212350273, 1e-12)
    assert grkhs.decay_rate("powerlaw:1:2") == 2.0
    assert math.isinf(grkhs.decay_rate("geom:0.5"))

    pts = [[-1.0], [0.0], [1.0]]
    e_spline = grkhs.spline_worst_case_error("iso:1", pts)
    assert e_spline >= grkhs.minimal_error("iso:1", 1, 3) - 1e-9
    e_empty = grkhs.spline_worst_case_error("iso:1", [], d=1)
    assert close(e_empty, seq[0], 1e-6)

    report = grkhs.tractability_probe("iso:1", [0.5, 0.25, 0.125], [1, 2, 4], "abs")
    assert len(report.cells) == 9
    assert report.classification in ("strong-poly", "poly", "quasi-poly-consistent", "inconclusive")

    for bad in (lambda: grkhs.UnivariateSpectrum(-1.0), lambda: grkhs.info_complexity("iso:x", 1, 0.1)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    os.environ["GRKHS_MAX_EIGS"] = "10"
    try:
        grkhs.top_eigenvalues("iso:1", 2, 50)
    except grkhs.ResourceLimitError:
        pass
    else:
        raise AssertionError("expected ResourceLimitError")
    finally:
        del os.environ["GRKHS_MAX_EIGS"]

    checks = grkhs.verify()
    failed = [c for c in checks if not c[2]]
    for c in checks:
        print(f"[{'PASS' if c[2] else 'FAIL'}] {c[0]:02} {c[1]}: {c[3]}")
    assert not failed, failed

    print(f"grkhs {grkhs.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
