"""
Constants for the CPCG toolkit

This module contains fixed values used throughout the package,
including chip presets, file-format keywords and the bench CSV schema.
"""

# Chimera chip presets: name -> (rows, cols, shore size)
CHIP_PRESETS = {
    "dw2": (8, 8, 4),        # 512-qubit generation
    "dw2x": (12, 12, 4),     # 1152-qubit generation
    "c16": (16, 16, 4),      # 2048-qubit generation
}

# Representative three-fault mask for the 512-qubit chip (509 operable qubits).
# Coordinates are (row, col, shore, wire) with shore 0=V, 1=H.
REPRESENTATIVE_509_MASK = [
    (1, 0, 1, 2),   # H-wire inside the first nexus
    (5, 2, 0, 1),   # V-wire on a bus column
    (0, 0, 0, 0),   # unused corner cell
]

# Product variable labels are "a:i" (variable a of K_m, copy i of K_n)
LABEL_SEPARATOR = ":"

# Bench CSV schema (column order is part of the file format)
BENCH_COLUMNS = [
    "method",
    "m",
    "n",
    "L",
    "chip_rows",
    "fault_seed",
    "dead_count",
    "success",
    "qubits",
    "chain_min",
    "chain_mean",
    "chain_max",
    "chain_stddev",
    "steps",
    "wall_ms",
]

BENCH_METHODS = ["cpcg", "triangular", "baseline", "ft"]
BENCH_SWEEPS = ["success", "quality", "faults", "scaling"]

# Label written into bench output for the heuristic
BASELINE_LABEL = "CMR-style baseline"

# Heuristic: base of the exponential overuse penalty on qubit weights
OVERUSE_PENALTY_BASE = 4.0

# Rendering
SVG_CELL_SIZE = 48
SVG_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]

# CLI exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
