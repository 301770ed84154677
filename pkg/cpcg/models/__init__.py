# Domain models
from .chimera import ChimeraSpec, QubitCoord, Shore, HardwareGraph, CapacityMap
from .problem import ProblemGraph, QuboMatrix, IsingModel, DoublyIndexedLabeling, Vartype
from .embedding import Embedding, ChainStats, ValidationReport, Violation, ViolationKind, DecodePolicy, EmbedOutcome
from .layout import Face, Subset, Interface, NexusLines, NexusTemplate, Placement, BusRun, Junction, BusPlan

__all__ = [
    "ChimeraSpec", "QubitCoord", "Shore", "HardwareGraph", "CapacityMap",
    "ProblemGraph", "QuboMatrix", "IsingModel", "DoublyIndexedLabeling", "Vartype",
    "Embedding", "ChainStats", "ValidationReport", "Violation", "ViolationKind", "DecodePolicy", "EmbedOutcome",
    "Face", "Subset", "Interface", "NexusLines", "NexusTemplate", "Placement", "BusRun", "Junction", "BusPlan",
]
