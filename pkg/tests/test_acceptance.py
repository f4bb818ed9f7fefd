"""Acceptance battery: every headline claim at its frozen tolerance.

Each test prints one pass/fail line so the suite output doubles as the
verification report; `fluxwalk verify` runs the same battery from the CLI.
"""

import numpy as np
import pytest

from fluxwalk import verify


def run(check, *args, **kwargs):
    result = check(*args, **kwargs)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {result.name}: {result.measured} (bound: {result.bound}) "
          f"[{result.seconds:.2f}s]")
    assert result.passed, f"{result.name}: {result.measured} (bound: {result.bound})"
    return result


def test_chiral_identity():
    run(verify.check_chiral_identity)


def test_chiral_identity_mutation_hook():
    # corrupting one entry of the chiral matrix must break the criterion
    broken = np.array([[0.0, -1.0j], [-1.0j, 0.0]])
    result = verify.check_chiral_identity(chiral=broken)
    print(f"mutation hook: passed={result.passed} ({result.measured})")
    assert not result.passed


def test_band_consistency():
    run(verify.check_band_consistency)


def test_winding_catalog():
    run(verify.check_winding_catalog)


def test_gap_index_catalog():
    run(verify.check_gap_index_catalog)


def test_geometric_oracle():
    run(verify.check_geometric_oracle)


def test_momentum_sector_oracle():
    run(verify.check_momentum_sector_oracle)


def test_edge_pair_catalog():
    run(verify.check_edge_pair_catalog)


def test_tau_z_gate():
    run(verify.check_tau_z_gate)


def test_doubled_period_response():
    run(verify.check_doubled_period)


def test_sector_classification():
    run(verify.check_sector_classification)


def test_mcd_quantization():
    run(verify.check_mcd_quantization)


def test_critical_expansions():
    run(verify.check_critical_expansions)


def test_benchmark_staggering():
    run(verify.check_benchmark_staggering)


def test_determinism():
    run(verify.check_determinism)
