"""
Render Service

SVG drawings of embeddings and bench results:
- Chip drawing: cell grid, V-shore and H-shore qubits as dots, chains
  coloured per variable and joined along their hardware couplers, dead
  qubits crossed out
- Bench plot: success rate and qubit totals against n, one line per method

Output is deterministic for identical input (fixed SVG id salt, no date).
"""

import io
from typing import Dict, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.patches as mpatches  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from cpcg.constants import BASELINE_LABEL, SVG_CELL_SIZE, SVG_PALETTE  # noqa: E402
from cpcg.exceptions import InputError  # noqa: E402
from cpcg.logger import get_logger  # noqa: E402
from cpcg.models.chimera import HardwareGraph, Shore  # noqa: E402
from cpcg.models.embedding import Embedding  # noqa: E402
from cpcg.services.chimera_topology import build_hardware  # noqa: E402
from cpcg.services.embedding_core import spanning_tree  # noqa: E402

logger = get_logger(__name__)

_DPI = 72
_STYLE = {"svg.hashsalt": "cpcg", "svg.fonttype": "none"}


def _to_svg(fig) -> str:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buffer.getvalue()


def qubit_position(hw: HardwareGraph, qubit: int) -> Tuple[float, float]:
    """
    Drawing coordinates of a qubit, one unit per cell, y growing downwards.

    V-shore qubits sit in a column on the left half of the cell, H-shore
    qubits in a row on the lower half.
    """
    row, col, shore, wire = hw.spec.to_coord(qubit)
    step = 0.6 / max(hw.spec.shore - 1, 1)
    if shore == Shore.V:
        return col + 0.2 + wire * step, row + 0.2
    return col + 0.2, row + 0.2 + wire * step


def render_embedding(emb: Embedding, hw: Optional[HardwareGraph] = None) -> str:
    """
    Draw an embedding on its chip.

    Args:
        emb: Embedding to draw (read-only)
        hw: Chip whose dead qubits are marked; defaults to the ideal chip

    Returns:
        SVG document
    """
    hw = hw or build_hardware(emb.spec)
    if hw.spec != emb.spec:
        raise InputError(f"embedding is for {emb.spec.describe()}, chip is {hw.spec.describe()}")
    spec = hw.spec
    owners = emb.owners()
    colours: Dict[object, str] = {
        v: SVG_PALETTE[i % len(SVG_PALETTE)] for i, v in enumerate(emb.variables)
    }

    with plt.rc_context(_STYLE):
        size = (spec.cols * SVG_CELL_SIZE / _DPI, spec.rows * SVG_CELL_SIZE / _DPI)
        fig, ax = plt.subplots(figsize=size, dpi=_DPI)
        ax.set_xlim(0, spec.cols)
        ax.set_ylim(spec.rows, 0)
        ax.set_aspect("equal")
        ax.axis("off")

        for row in range(spec.rows):
            for col in range(spec.cols):
                ax.add_patch(mpatches.Rectangle(
                    (col + 0.05, row + 0.05), 0.9, 0.9,
                    linewidth=0.5, edgecolor="#bbbbbb", facecolor="none", zorder=0,
                ))

        operable = frozenset(hw.graph.nodes)
        for variable, chain in emb.chains.items():
            for a, b in spanning_tree(hw, chain & operable):
                (xa, ya), (xb, yb) = qubit_position(hw, a), qubit_position(hw, b)
                ax.plot([xa, xb], [ya, yb], color=colours[variable], linewidth=1.2, zorder=1)

        idle: List[Tuple[float, float]] = []
        for qubit in range(spec.num_qubits):
            x, y = qubit_position(hw, qubit)
            if not hw.is_operable(qubit):
                ax.scatter([x], [y], marker="x", s=18, color="#000000", zorder=3)
            elif qubit in owners:
                ax.scatter([x], [y], s=10, color=colours[owners[qubit]], zorder=2)
            else:
                idle.append((x, y))
        if idle:
            xs, ys = zip(*idle)
            ax.scatter(xs, ys, s=4, color="#dddddd", zorder=2)

        ax.set_title(f"{len(emb.chains)} chains, {len(owners)} qubits on {spec.describe()}", fontsize=8)
        svg = _to_svg(fig)
    logger.debug(f"Rendered {len(emb.chains)} chains on {spec.describe()}")
    return svg


def render_plot(frame: pd.DataFrame) -> str:
    """
    Line charts of a bench table: mean success rate and mean qubit total of
    successful rows against n, one line per method.
    """
    missing = {"method", "n", "success", "qubits"} - set(frame.columns)
    if missing:
        raise InputError(f"bench table lacks columns {sorted(missing)}")

    success = frame.groupby(["method", "n"])["success"].mean().unstack(level=0).sort_index()
    solved = frame[frame["success"] > 0]
    qubits = solved.groupby(["method", "n"])["qubits"].mean().unstack(level=0).sort_index()

    with plt.rc_context(_STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4), dpi=_DPI)
        for i, method in enumerate(sorted(success.columns)):
            colour = SVG_PALETTE[i % len(SVG_PALETTE)]
            label = BASELINE_LABEL if method == "baseline" else method
            left.plot(success.index, success[method], marker="o", color=colour, label=label)
            if method in qubits.columns:
                right.plot(qubits.index, qubits[method], marker="o", color=colour, label=label)
        left.set_xlabel("n")
        left.set_ylabel("success rate")
        left.set_ylim(-0.05, 1.05)
        right.set_xlabel("n")
        right.set_ylabel("qubits")
        left.legend(fontsize=8)
        right.legend(fontsize=8)
        fig.tight_layout()
        return _to_svg(fig)
