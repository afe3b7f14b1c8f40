"""
Readers and writers for measure, partition, realization and graph files.

JSON documents are validated through their pydantic models; the graph
format is plain text: "n m" on the first line, then m lines "u v p/q".
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple, Type, Union

from fkglab.config import settings
from fkglab.exceptions import (
    CapacityError,
    FkgLabError,
    InvalidGraphError,
    InvalidMeasureError,
    InvalidPartitionError,
    InvalidRationalError,
    RealizationError,
)
from fkglab.models.rationals import parse_rational
from fkglab.models.schemas import (
    MeasureDocument,
    PartitionDocument,
    RealizationDocument,
    RealizationOutputDocument,
)
from fkglab.services.lattice import point_from_string, point_to_string
from fkglab.services.measures import ZERO, Measure
from fkglab.services.percolation import EdgeGraph
from fkglab.services.realization import Realization
from fkglab.services.strong_inequality import Partition, partition_from_blocks

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_json(path: PathLike, error: Type[FkgLabError]) -> dict:
    """Parsed JSON document; malformed text raises `error`, the error of the file kind"""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise error(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from e


def _write_text(path: PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
        handle.write("\n")


# ==================== MEASURES ====================

def measure_from_document(document: MeasureDocument) -> Measure:
    n = document.n
    if n > settings.dimension_cap:
        raise CapacityError("dimension", n, settings.dimension_cap)
    weights = [ZERO] * (1 << n)
    for key, weight in document.weights.items():
        if len(key) != n or set(key) - {"0", "1"}:
            raise InvalidMeasureError(f"point {key!r} is not a binary string of length {n}")
        weights[point_from_string(key)] = weight
    return Measure(tuple(weights), n)


def measure_to_document(measure: Measure) -> MeasureDocument:
    return MeasureDocument(n=measure.dimension, weights=measure.as_dict())


def measure_to_json(measure: Measure) -> str:
    return measure_to_document(measure).model_dump_json(indent=2)


def load_measure(path: PathLike) -> Measure:
    document = MeasureDocument.model_validate(_read_json(path, InvalidMeasureError))
    measure = measure_from_document(document)
    logger.debug(f"[FILES] Loaded measure on H_{measure.dimension} from {path}")
    return measure


def dump_measure(measure: Measure, path: PathLike) -> None:
    _write_text(path, measure_to_json(measure))
    logger.debug(f"[FILES] Wrote measure on H_{measure.dimension} to {path}")


# ==================== PARTITIONS ====================

def partition_from_document(document: PartitionDocument) -> Partition:
    return partition_from_blocks(document.n, document.A, document.B, document.C)


def partition_to_document(partition: Partition) -> PartitionDocument:
    return PartitionDocument(
        n=partition.dimension,
        k=partition.k,
        A=partition.a.to_strings(),
        B=partition.b.to_strings(),
        C=[block.to_strings() for block in partition.c],
    )


def load_partition(path: PathLike) -> Partition:
    return partition_from_document(PartitionDocument.model_validate(_read_json(path, InvalidPartitionError)))


def dump_partition(partition: Partition, path: PathLike) -> None:
    _write_text(path, partition_to_document(partition).model_dump_json(indent=2))


# ==================== REALIZATIONS ====================

def realization_from_document(document: RealizationDocument) -> Realization:
    outputs = tuple(
        int(output.table[::-1], 2) for output in document.outputs
    )
    return Realization(tuple(document.sources), outputs, tuple(document.names))


def realization_to_document(realization: Realization) -> RealizationDocument:
    return RealizationDocument(
        m=realization.m,
        sources=list(realization.sources),
        outputs=[RealizationOutputDocument(table=realization.table_string(i)) for i in range(realization.n)],
        names=list(realization.names),
    )


def realization_to_json(realization: Realization) -> str:
    return realization_to_document(realization).model_dump_json(indent=2)


def load_realization(path: PathLike) -> Realization:
    return realization_from_document(RealizationDocument.model_validate(_read_json(path, RealizationError)))


def dump_realization(realization: Realization, path: PathLike) -> None:
    _write_text(path, realization_to_json(realization))
    logger.debug(f"[FILES] Wrote realization with m={realization.m} sources to {path}")


# ==================== GRAPHS ====================

def parse_graph(text: str) -> EdgeGraph:
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise InvalidGraphError("empty graph file")
    header = lines[0].split()
    if len(header) != 2 or not all(x.isdigit() for x in header):
        raise InvalidGraphError(f"header must be 'n m', got {lines[0]!r}")
    vertex_count, edge_count = int(header[0]), int(header[1])
    if len(lines) - 1 != edge_count:
        raise InvalidGraphError(f"header announces {edge_count} edges, found {len(lines) - 1}")
    edges = []
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != 3 or not fields[0].isdigit() or not fields[1].isdigit():
            raise InvalidGraphError(f"line {number}: expected 'u v p/q', got {line!r}")
        try:
            p = parse_rational(fields[2])
        except InvalidRationalError as e:
            raise InvalidGraphError(f"line {number}: {e}") from e
        edges.append((int(fields[0]), int(fields[1]), p))
    return EdgeGraph.build(vertex_count, edges)


def graph_to_text(graph: EdgeGraph) -> str:
    lines = [f"{graph.vertex_count} {graph.edge_count}"]
    lines += [f"{e.u} {e.v} {e.p.numerator}/{e.p.denominator}" for e in graph.edges]
    return "\n".join(lines)


def load_graph(path: PathLike) -> EdgeGraph:
    with open(path, "r", encoding="utf-8") as handle:
        graph = parse_graph(handle.read())
    logger.debug(f"[FILES] Loaded graph with {graph.edge_count} edges from {path}")
    return graph


def measure_table(measure: Measure) -> List[Tuple[str, Fraction]]:
    """(point, weight) rows for every point, in index order"""
    return [(point_to_string(v, measure.dimension), w) for v, w in enumerate(measure.weights)]
