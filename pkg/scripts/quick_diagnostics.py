#!/usr/bin/env python3
"""
Quick Diagnostics for the CPCG toolkit

Runs the headline checks in a few seconds:
1. Configuration values
2. Ideal-chip constructions (K_8 □ K_7 on the 512-qubit chip)
3. Fault tolerance on the representative 509-qubit chip
4. Optimality and refusal certificates
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from cpcg.config import settings
from cpcg.logger import get_logger, setup_logging
from cpcg.services.analysis import Verdict, optimality_certificate, refusal_certificate
from cpcg.services.chimera_topology import ideal_hardware, preset_hardware
from cpcg.services.cpcg_embedder import cpcg_embed
from cpcg.services.embedding_core import chain_stats, validate
from cpcg.services.fault_tolerant_embedder import ft_cpcg_embed
from cpcg.services.problem_model import product_graph

logger = get_logger(__name__)


def check_configuration():
    """Check settings are in range."""
    print("🔧 CONFIGURATION CHECK")
    print("-" * 40)

    issues = []
    if settings.DEFAULT_SHORE_SIZE < 2:
        issues.append(f"❌ DEFAULT_SHORE_SIZE={settings.DEFAULT_SHORE_SIZE} (needs >= 2)")
    else:
        print(f"✅ Shore size: {settings.DEFAULT_SHORE_SIZE}")
    if settings.FT_MAX_EXTENSIONS < 1:
        issues.append(f"❌ FT_MAX_EXTENSIONS={settings.FT_MAX_EXTENSIONS} (needs >= 1)")
    else:
        print(f"✅ Fault-tolerant extensions per copy: {settings.FT_MAX_EXTENSIONS}")
    print(f"✅ Seed: {settings.CPCG_SEED}, bench workers: {settings.BENCH_WORKERS}")
    return issues


def check_constructions():
    """Check the diagonal construction on the ideal chip."""
    print("\n🧩 CONSTRUCTION CHECK")
    print("-" * 40)

    issues = []
    spec, emb = cpcg_embed(8, 7)
    stats = chain_stats(emb)
    if spec.rows != 8 or stats.qubit_total != 504:
        issues.append(f"❌ K_8 □ K_7: {stats.qubit_total} qubits on {spec.describe()} (expected 504 on C_8)")
    elif not validate(product_graph(8, 7), ideal_hardware(8), emb).valid:
        issues.append("❌ K_8 □ K_7: embedding does not validate")
    else:
        print(f"✅ K_8 □ K_7: {stats.qubit_total} qubits, chains of {stats.chain_max} on {spec.describe()}")
    return issues


def check_faults():
    """Check the fault-tolerant embedder on the 509-qubit chip."""
    print("\n🛠️  FAULT TOLERANCE CHECK")
    print("-" * 40)

    issues = []
    hw = preset_hardware("dw2", with_509_mask=True)
    outcome = ft_cpcg_embed(hw, 8, 6)
    if not outcome.success:
        issues.append(f"❌ K_8 □ K_6 on 509 qubits: {outcome.details.get('reason')}")
    elif not validate(product_graph(8, 6), hw, outcome.embedding).valid:
        issues.append("❌ K_8 □ K_6 on 509 qubits: embedding does not validate")
    else:
        print(f"✅ K_8 □ K_6 on {hw.num_operable} qubits: "
              f"{outcome.details['extensions']} extensions")
    return issues


def check_certificates():
    """Check optimality and refusal verdicts."""
    print("\n📐 CERTIFICATE CHECK")
    print("-" * 40)

    issues = []
    for m, n in ((8, 7), (8, 15)):
        verdict = optimality_certificate(m, n, 4).verdict
        if verdict is Verdict.PROVABLY_OPTIMAL:
            print(f"✅ K_{m} □ K_{n}: {verdict.value}")
        else:
            issues.append(f"❌ K_{m} □ K_{n}: {verdict.value}")
    refusal = refusal_certificate(8, 8, 8, 4)
    if refusal.verdict is Verdict.BEYOND_CONSTRUCTION:
        print(f"✅ K_8 □ K_8 on C_8: {refusal.verdict.value}")
    else:
        issues.append(f"❌ K_8 □ K_8 on C_8: {refusal.verdict.value}")
    return issues


def main():
    """Run all diagnostics."""
    setup_logging("WARNING")
    print("=" * 60)
    print("CPCG - QUICK DIAGNOSTICS")
    print("=" * 60)

    all_issues = []
    all_issues.extend(check_configuration())
    all_issues.extend(check_constructions())
    all_issues.extend(check_faults())
    all_issues.extend(check_certificates())

    print("\n" + "=" * 60)
    print("DIAGNOSTIC SUMMARY")
    print("=" * 60)

    if not all_issues:
        print("🎉 All checks passed!")
        print("\nYou can now run:")
        print("  - pytest (full test suite)")
        print("  - python -m cpcg bench quality -o bench.csv")
    else:
        print(f"⚠️  Found {len(all_issues)} issues:")
        for issue in all_issues:
            print(f"  {issue}")
        logger.error(f"{len(all_issues)} diagnostic checks failed")

    print("\n" + "=" * 60)
    return 0 if not all_issues else 1


if __name__ == "__main__":
    sys.exit(main())
