"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
The JSON exchange format shared by every command.

A matrix document reads

    {"shape": [2, 1], "order": 2, "rows": 9, "cols": 9,
     "data": [[re, im], ...]}

with data in row-major order. Entries below 1e-14 in absolute value are
written as exact zeros. States add a "trace" field.
"""

import json
import math
from typing import Any, Dict, List, Optional, cast

import numpy as np

from .algebra import AlgebraShape, BiElement, BlockElement, element_type
from .constants import SEARCH_HISTORY_POINTS, ZERO_EMIT_THRESHOLD
from .exceptions import ExchangeFormatError
from .models import (
    AxiomReport,
    DistanceBracket,
    FiniteMetricSpace,
    MetricCandidate,
    NoGoReport,
    SearchConfig,
    SearchOutcome,
    State,
)
from .search import certify

Document = Dict[str, Any]


def _emit(value: float) -> float:
    return 0.0 if abs(value) < ZERO_EMIT_THRESHOLD else float(value)


def _pairs(values: np.ndarray) -> List[List[float]]:
    flat = np.asarray(values, dtype=complex).ravel()
    return [[_emit(z.real), _emit(z.imag)] for z in flat]


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _parse(text: str) -> Document:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ExchangeFormatError(f"Invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ExchangeFormatError("Expected a JSON object.")
    return doc


# --- Matrices ---


def element_document(x: BlockElement) -> Document:
    return {
        "shape": list(x.shape.blocks),
        "order": x.order,
        "rows": x.size,
        "cols": x.size,
        "data": _pairs(x.data),
    }


def element_from_document(doc: Document, order: Optional[int] = None) -> BlockElement:
    """
    Rebuild an element from a matrix document.

    Raises:
        ExchangeFormatError: If a field is missing or inconsistent.
    """
    try:
        shape = AlgebraShape(blocks=tuple(doc["shape"]))
        doc_order = int(doc["order"])
        rows, cols = int(doc["rows"]), int(doc["cols"])
        pairs = np.asarray(doc["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ExchangeFormatError(f"Invalid matrix document: {e}") from e
    if order is not None and doc_order != order:
        raise ExchangeFormatError(
            f"Expected an order {order} element, got {doc_order}."
        )
    size = shape.dim**doc_order
    if (rows, cols) != (size, size):
        raise ExchangeFormatError(
            f"Shape {shape} at order {doc_order} needs {size}x{size}, "
            f"got {rows}x{cols}."
        )
    if pairs.shape != (size * size, 2):
        raise ExchangeFormatError(
            f"Expected {size * size} [re, im] pairs, got array of shape {pairs.shape}."
        )
    data = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(size, size)
    try:
        return element_type(doc_order)(shape=shape, data=data)
    except ValueError as e:
        raise ExchangeFormatError(str(e)) from e


def dump_element(x: BlockElement) -> str:
    return json.dumps(element_document(x), indent=2)


def load_element(text: str, order: Optional[int] = None) -> BlockElement:
    return element_from_document(_parse(text), order)


def load_metric(text: str) -> BiElement:
    """Load a candidate metric rho (an order 2 element)."""
    return cast(BiElement, load_element(text, order=2))


# --- States ---


def dump_state(state: State) -> str:
    x = element_type(1)(shape=state.shape, data=state.matrix())
    doc = element_document(x)
    doc["trace"] = _emit(float(np.trace(state.matrix()).real))
    return json.dumps(doc, indent=2)


def load_state(text: str) -> State:
    """
    Raises:
        ExchangeFormatError: If the document is not a valid state.
    """
    doc = _parse(text)
    element = element_from_document(doc, order=1)
    if "trace" in doc and not math.isclose(float(doc["trace"]), 1.0, abs_tol=1e-9):
        raise ExchangeFormatError(f"A state has trace 1, got {doc['trace']}.")
    try:
        return State.from_matrix(element.shape, element.data)
    except ValueError as e:
        raise ExchangeFormatError(f"Invalid state: {e}") from e


# --- Reports and results ---


def report_document(report: AxiomReport) -> Document:
    records = []
    for record in report.records:
        entry: Document = {
            "axiom": record.axiom,
            "passed": record.passed,
            "margin": record.margin,
            "indeterminate": record.indeterminate,
            "note": record.note,
        }
        if record.witness is not None:
            entry["witness"] = _pairs(record.witness)
        records.append(entry)
    return {
        "mode": report.mode,
        "shape": list(report.shape.blocks),
        "passed": report.passed,
        "tolerances": report.tolerances.model_dump(),
        "seed": report.tolerances.seed,
        "skipped": list(report.skipped),
        "records": records,
    }


def dump_report(report: AxiomReport) -> str:
    return json.dumps(report_document(report), indent=2)


def candidate_document(candidate: MetricCandidate) -> Document:
    doc = element_document(candidate.rho)
    doc["diameter"] = candidate.diameter
    if candidate.report is not None:
        doc["report"] = report_document(candidate.report)
    return doc


def dump_candidate(candidate: MetricCandidate) -> str:
    """A candidate is a matrix document with diameter and report attached."""
    return json.dumps(candidate_document(candidate), indent=2)


def dump_bracket(bracket: DistanceBracket) -> str:
    doc = bracket.model_dump()
    doc["upper"] = _finite_or_none(bracket.upper)
    doc["lower"] = _finite_or_none(bracket.lower)
    return json.dumps(doc, indent=2)


def downsample(history: List[Any], points: int = SEARCH_HISTORY_POINTS) -> List[int]:
    """At most `points` evenly spread indices, first and last included."""
    if len(history) <= points:
        return list(range(len(history)))
    return sorted({int(i) for i in np.linspace(0, len(history) - 1, points).round()})


def dump_outcome(outcome: SearchOutcome) -> str:
    indices = downsample(outcome.residual_history)
    doc = {
        "status": outcome.status,
        "mode": outcome.mode,
        "config": outcome.config.model_dump(mode="json"),
        "candidate": (
            None
            if outcome.candidate is None
            else candidate_document(outcome.candidate)
        ),
        "residual_history": [
            [i + 1, *outcome.residual_history[i]] for i in indices
        ],
        "best_residual": _finite_or_none(outcome.best_residual),
        "seed_used": outcome.seed_used,
        "restart_index": outcome.restart_index,
        "iterations": outcome.iterations,
    }
    return json.dumps(doc, indent=2)


def load_outcome(text: str) -> SearchOutcome:
    """
    Rebuild a SearchOutcome; the candidate is certified again with the echoed
    config, so a found status survives only if the verdict is reproduced.

    Raises:
        ExchangeFormatError: If the document is malformed or the verdict differs.
    """
    doc = _parse(text)
    try:
        config = SearchConfig.model_validate(doc["config"])
        mode = doc["mode"]
        candidate = None
        if doc["candidate"] is not None:
            rho = cast(BiElement, element_from_document(doc["candidate"], order=2))
            report = certify(
                rho, config.shape, config, mode, floor=_stored_floor(doc["candidate"])
            )
            candidate = MetricCandidate.from_rho(rho, report=report)
        return SearchOutcome(
            status=doc["status"],
            mode=mode,
            config=config,
            candidate=candidate,
            residual_history=[tuple(row[1:]) for row in doc["residual_history"]],
            best_residual=(
                math.inf if doc["best_residual"] is None else doc["best_residual"]
            ),
            seed_used=doc["seed_used"],
            restart_index=doc["restart_index"],
            iterations=doc["iterations"],
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ExchangeFormatError(f"Invalid search outcome: {e}") from e


def _stored_floor(candidate: Document) -> Optional[float]:
    """The (iii)' floor the candidate was certified with, if recorded."""
    report = candidate.get("report") or {}
    floor = report.get("tolerances", {}).get("strict_floor")
    return None if floor is None else float(floor)


# --- Metric spaces and the no-go report ---


def dump_metric_space(space: FiniteMetricSpace) -> str:
    return json.dumps({"n": space.n, "d": space.d.tolist()}, indent=2)


def load_metric_space(text: str) -> FiniteMetricSpace:
    """
    Read a metric space from JSON {n, d} or from a lower-triangle text.

    Raises:
        ExchangeFormatError: If neither format parses.
        ValueError: If the parsed matrix is not a metric.
    """
    if text.lstrip().startswith("{"):
        return FiniteMetricSpace.from_json(text)
    return FiniteMetricSpace.from_lower_triangle(text)


def dump_nogo(report: NoGoReport) -> str:
    doc = {
        "reproduced": report.reproduced,
        "entries": [
            {**entry.model_dump(), "reproduced": entry.reproduced}
            for entry in report.entries
        ],
    }
    return json.dumps(doc, indent=2)
