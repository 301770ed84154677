"""
File Formats Service

Line-oriented text formats (``#`` starts a comment) and JSON embeddings:
- Hardware:   ``chimera N M L`` then ``dead_qubit id`` / ``dead_coupler a b``
- Edge list:  ``p graph nv ne``, optional ``v label``, then ``e u v``
- QUBO:       ``p qubo n``, optional ``o offset`` / ``l index label``, then ``q i j c``
- Ising:      ``p ising n``, ``v index qubit``, ``h index value``, ``j i j value``
- Embedding:  {"spec": {"rows", "cols", "shore"}, "chains": {"<var>": [ids]}}

Every writer replaces its target atomically (temporary file + rename).
Variable labels are written as ``a:i`` for pairs and plain text otherwise.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Dict, Hashable, Iterator, List, Optional, Tuple, Union

import networkx as nx
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from cpcg.constants import LABEL_SEPARATOR
from cpcg.exceptions import FormatError, InputError
from cpcg.logger import get_logger
from cpcg.models.chimera import ChimeraSpec, HardwareGraph
from cpcg.models.embedding import Embedding
from cpcg.models.problem import IsingModel, ProblemGraph, QuboMatrix
from cpcg.services.chimera_topology import build_hardware

logger = get_logger(__name__)

PathLike = Union[str, Path]


class SpecDocument(BaseModel):
    rows: int = Field(gt=0)
    cols: int = Field(gt=0)
    shore: int = Field(ge=2)


class EmbeddingDocument(BaseModel):
    spec: SpecDocument
    chains: Dict[str, List[int]]


def label_to_str(label: Hashable) -> str:
    if isinstance(label, tuple):
        return LABEL_SEPARATOR.join(str(part) for part in label)
    return str(label)


def _atom(text: str) -> Union[int, str]:
    try:
        return int(text)
    except ValueError:
        return text


def parse_label(text: str) -> Hashable:
    """Inverse of label_to_str: "3:1" -> (3, 1), "7" -> 7, other text unchanged"""
    if LABEL_SEPARATOR in text:
        return tuple(_atom(part) for part in text.split(LABEL_SEPARATOR))
    return _atom(text)


def write_atomic(path: PathLike, text: str):
    """Write text to path through a temporary file in the same directory"""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {target}")


def _records(path: PathLike) -> Iterator[Tuple[int, List[str]]]:
    """(line number, tokens) of non-empty, non-comment lines"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def problem_kind(path: PathLike) -> str:
    """"qubo" or "graph" from the header of a problem file"""
    for _, tokens in _records(path):
        return "qubo" if tokens[:2] == ["p", "qubo"] else "graph"
    raise FormatError("empty problem file", str(path))


def _ints(tokens: List[str], count: int, path: PathLike, number: int) -> List[int]:
    if len(tokens) != count:
        raise FormatError(f"expected {count} values after '{tokens[0]}', got {len(tokens) - 1}",
                          str(path), number)
    try:
        return [int(t) for t in tokens[1:]]
    except ValueError:
        raise FormatError(f"non-integer value in '{' '.join(tokens)}'", str(path), number) from None


def _float(token: str, path: PathLike, number: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise FormatError(f"invalid number '{token}'", str(path), number) from None


# Hardware


def read_hardware(path: PathLike) -> HardwareGraph:
    """Parse a hardware file into a HardwareGraph"""
    spec: Optional[ChimeraSpec] = None
    dead_q: List[int] = []
    dead_c: List[Tuple[int, int]] = []
    for number, tokens in _records(path):
        keyword = tokens[0]
        if spec is None:
            if keyword != "chimera":
                raise FormatError("first line must be 'chimera N M L'", str(path), number)
            try:
                spec = ChimeraSpec(*_ints(tokens, 4, path, number))
            except InputError as exc:
                raise FormatError(str(exc), str(path), number) from None
        elif keyword == "dead_qubit":
            dead_q.append(_ints(tokens, 2, path, number)[0])
        elif keyword == "dead_coupler":
            a, b = _ints(tokens, 3, path, number)
            dead_c.append((a, b))
        else:
            raise FormatError(f"unknown keyword '{keyword}'", str(path), number)
    if spec is None:
        raise FormatError("missing 'chimera N M L' line", str(path))
    try:
        return build_hardware(spec, dead_q, dead_c)
    except InputError as exc:
        raise FormatError(str(exc), str(path)) from None


def format_hardware(hw: HardwareGraph) -> str:
    spec = hw.spec
    lines = [f"chimera {spec.rows} {spec.cols} {spec.shore}"]
    lines += [f"dead_qubit {q}" for q in sorted(hw.dead_qubits)]
    lines += [f"dead_coupler {a} {b}" for a, b in sorted(hw.dead_couplers)]
    return "\n".join(lines) + "\n"


def write_hardware(path: PathLike, hw: HardwareGraph):
    write_atomic(path, format_hardware(hw))


# Edge list


def read_edge_list(path: PathLike) -> ProblemGraph:
    graph = nx.Graph()
    header: Optional[Tuple[int, int, int]] = None
    for number, tokens in _records(path):
        keyword = tokens[0]
        if header is None:
            if keyword != "p" or len(tokens) != 4 or tokens[1] != "graph":
                raise FormatError("first line must be 'p graph <nv> <ne>'", str(path), number)
            nv, ne = _ints(tokens[1:], 3, path, number)
            header = (nv, ne, number)
        elif keyword == "v" and len(tokens) == 2:
            graph.add_node(parse_label(tokens[1]))
        elif keyword == "e" and len(tokens) == 3:
            u, v = parse_label(tokens[1]), parse_label(tokens[2])
            if u == v:
                raise FormatError(f"self-loop on {tokens[1]}", str(path), number)
            graph.add_edge(u, v)
        else:
            raise FormatError(f"unrecognised line '{' '.join(tokens)}'", str(path), number)
    if header is None:
        raise FormatError("missing 'p graph' header", str(path))
    nv, ne, number = header
    if graph.number_of_nodes() < nv and all(isinstance(v, int) for v in graph.nodes):
        graph.add_nodes_from(range(nv))
    if graph.number_of_nodes() != nv or graph.number_of_edges() != ne:
        raise FormatError(
            f"header declares {nv} vertices/{ne} edges, file has "
            f"{graph.number_of_nodes()}/{graph.number_of_edges()}", str(path), number,
        )
    return graph


def format_edge_list(graph: ProblemGraph) -> str:
    lines = [f"p graph {graph.number_of_nodes()} {graph.number_of_edges()}"]
    lines += [f"v {label_to_str(v)}" for v in graph.nodes]
    lines += [f"e {label_to_str(u)} {label_to_str(v)}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def write_edge_list(path: PathLike, graph: ProblemGraph):
    write_atomic(path, format_edge_list(graph))


# QUBO


def read_qubo(path: PathLike) -> QuboMatrix:
    n: Optional[int] = None
    offset = 0.0
    labels: Dict[int, Hashable] = {}
    terms: Dict[Tuple[int, int], float] = {}
    for number, tokens in _records(path):
        keyword = tokens[0]
        if n is None:
            if keyword != "p" or len(tokens) != 3 or tokens[1] != "qubo":
                raise FormatError("first line must be 'p qubo <n>'", str(path), number)
            n = _ints(tokens[1:], 2, path, number)[0]
        elif keyword == "q" and len(tokens) == 4:
            i, j = _ints(tokens[:3], 3, path, number)
            if not (0 <= i < n and 0 <= j < n):
                raise FormatError(f"index outside 0..{n - 1}", str(path), number)
            key = (i, j) if i <= j else (j, i)
            terms[key] = terms.get(key, 0.0) + _float(tokens[3], path, number)
        elif keyword == "o" and len(tokens) == 2:
            offset += _float(tokens[1], path, number)
        elif keyword == "l" and len(tokens) == 3:
            index = _ints(tokens[:2], 2, path, number)[0]
            labels[index] = parse_label(tokens[2])
        else:
            raise FormatError(f"unrecognised line '{' '.join(tokens)}'", str(path), number)
    if n is None:
        raise FormatError("missing 'p qubo' header", str(path))
    names = [labels.get(i, i) for i in range(n)]
    return QuboMatrix.from_terms(n, terms, offset=offset, labels=names)


def format_qubo(q: QuboMatrix) -> str:
    lines = [f"p qubo {q.n}"]
    if q.offset:
        lines.append(f"o {q.offset!r}")
    lines += [f"l {i} {label_to_str(label)}" for i, label in enumerate(q.labels) if label != i]
    lines += [f"q {i} {j} {c!r}" for (i, j), c in q.terms.items()]
    return "\n".join(lines) + "\n"


def write_qubo(path: PathLike, q: QuboMatrix):
    write_atomic(path, format_qubo(q))


# Physical Ising


def format_ising(model: IsingModel) -> str:
    lines = [f"p ising {model.n}"]
    lines += [f"v {i} {label_to_str(v)}" for i, v in enumerate(model.variables)]
    lines += [f"h {i} {float(value)!r}" for i, value in enumerate(model.h) if value != 0]
    lines += [f"j {i} {j} {value!r}" for (i, j), value in sorted(model.J.items())]
    return "\n".join(lines) + "\n"


def write_ising(path: PathLike, model: IsingModel):
    write_atomic(path, format_ising(model))


# Embedding JSON


def embedding_to_json(emb: Embedding) -> str:
    document = {
        "spec": {"rows": emb.spec.rows, "cols": emb.spec.cols, "shore": emb.spec.shore},
        "chains": {label_to_str(v): sorted(chain) for v, chain in emb.chains.items()},
    }
    return json.dumps(document, indent=2) + "\n"


def write_embedding(path: PathLike, emb: Embedding):
    write_atomic(path, embedding_to_json(emb))


def read_embedding(path: PathLike) -> Embedding:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, str(path), exc.lineno) from None
    try:
        document = EmbeddingDocument.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise FormatError(f"{where}: {first['msg']}", str(path)) from None
    spec = ChimeraSpec(document.spec.rows, document.spec.cols, document.spec.shore)
    chains = {}
    for key, qubits in document.chains.items():
        bad = [q for q in qubits if not spec.contains(q)]
        if bad:
            raise FormatError(f"chain '{key}' has qubit {bad[0]} outside {spec.describe()}", str(path))
        chains[parse_label(key)] = qubits
    return Embedding.from_chains(spec, chains)


# Bench CSV


def write_csv(path: PathLike, frame: pd.DataFrame):
    write_atomic(path, frame.to_csv(index=False, lineterminator="\n"))


def read_csv(path: PathLike) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise FormatError(f"unreadable CSV: {exc}", str(path)) from None
