"""Smoke test for the stabcert Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import json
import math
import sys

import stabcert_py as sc

FIVE_QUBIT = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]


def main() -> int:
    gme, violating = sc.is_gme(FIVE_QUBIT)
    assert gme and violating is None

    gme, violating = sc.is_gme(["XXII", "ZZII", "IIXX", "IIZZ"])
    assert not gme and violating == [1, 2]

    cert = json.loads(sc.witness_certificate(FIVE_QUBIT))
    assert cert["schema"] == "stabcert/witness/v1"
    assert len(cert["pairs"]) == 10 and not cert["missing_pairs"]

    report = json.loads(sc.verify(FIVE_QUBIT, mode="both"))
    assert report["passed"]
    assert min(p["min_fidelity"] for p in report["pairs"]) >= 1 - 1e-9

    for n in range(2, 6):
        expected = 2 * n * math.sin(math.pi / (4 * n)) ** 2
        assert abs(sc.chained_minimum(n) - expected) < 1e-6

    raw, clamped = sc.aggregate_bound([0.874] * 10, 5)
    assert abs(raw - 0.685) < 1e-9 and clamped == raw
    assert sc.gmnl_threshold(5) == (0.6, 4, 11)
    assert sc.max_gme_dimension(4) == 2 and sc.max_gme_dimension(11) == 64

    try:
        sc.is_gme(["XI", "ZI"])
    except ValueError as e:
        assert "do not commute" in str(e)
    else:
        raise AssertionError("anticommuting generators accepted")

    print("python bindings: all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
