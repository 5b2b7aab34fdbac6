"""JSON net specifications, reports and CSV traces."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .errors import HarmonicNetError, InvalidPointError
from .graph import WeightedGraph, validate
from .net import NetMap, RelaxationReport, interpolate_pins, random_init
from .spaces import MetricSpace, parse_space


class NetFileError(HarmonicNetError, ValueError):
    """A net specification or report file is malformed."""


def _field(name, exc):
    return NetFileError(f"field {name}: {exc}")


def read_json(path) -> dict:
    path = Path(path)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NetFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise NetFileError(f"{path}: {exc.strerror}") from None
    if not isinstance(data, dict):
        raise NetFileError(f"{path}: top level must be a JSON object")
    return data


def parse_net(data: dict, base_dir=None, seed: int | None = None) -> NetMap:
    """Build a map from a parsed net specification or report.

    Reports carry the final images under ``final``; these take precedence
    over ``init``. ``seed`` overrides the seed of a ``random:<seed>`` init.
    """
    for key in ("space", "graph"):
        if key not in data:
            raise NetFileError(f"missing field {key!r}")
    try:
        space = parse_space(str(data["space"]), base_dir)
    except HarmonicNetError as exc:
        raise _field("space", exc) from None
    try:
        graph = WeightedGraph.from_json(data["graph"])
    except HarmonicNetError as exc:
        raise _field("graph", exc) from None
    problems = validate(graph)
    if problems:
        raise NetFileError("field graph: " + "; ".join(problems))

    pins = {}
    raw_pins = data.get("pins") or {}
    if not isinstance(raw_pins, dict):
        raise NetFileError("field pins: must map vertex indices to coordinates")
    for key, coords in raw_pins.items():
        try:
            i = int(key)
        except ValueError:
            raise NetFileError(f"field pins[{key!r}]: vertex index must be an integer") from None
        if not 0 <= i < graph.n_vertices:
            raise NetFileError(f"field pins[{key!r}]: no vertex {i}")
        try:
            pins[i] = space.point(coords, project=True)
        except InvalidPointError as exc:
            raise _field(f"pins[{key!r}]", exc) from None

    init = data.get("final", data.get("init", "interpolate-pins"))
    try:
        if isinstance(init, list):
            if len(init) != graph.n_vertices:
                raise NetFileError(f"{len(init)} points for {graph.n_vertices} vertices")
            image = []
            for i, coords in enumerate(init):
                try:
                    image.append(pins[i] if i in pins else space.point(coords, project=True))
                except InvalidPointError as exc:
                    raise NetFileError(f"[{i}]: {exc}") from None
        elif init == "interpolate-pins":
            image = interpolate_pins(graph, space, pins)
        elif isinstance(init, str) and init.startswith("random"):
            _, _, arg = init.partition(":")
            if seed is None:
                try:
                    seed = int(arg) if arg else 0
                except ValueError:
                    raise NetFileError(f"bad seed {arg!r}") from None
            image = random_init(graph, space, pins, seed)
        else:
            raise NetFileError(f"unknown initialization {init!r}")
    except HarmonicNetError as exc:
        raise _field("init" if "final" not in data else "final", exc) from None
    return NetMap(graph, space, image, pins)


def load_net(path, seed: int | None = None) -> NetMap:
    path = Path(path)
    return parse_net(read_json(path), base_dir=path.parent, seed=seed)


def space_descriptor(space: MetricSpace) -> str:
    return space.descriptor()


def net_to_json(f: NetMap) -> dict:
    """Net specification with an explicit image for every vertex."""
    return {
        "space": space_descriptor(f.space),
        "graph": f.graph.to_json(),
        "pins": {str(i): f.space.coords(f.image[i]) for i in sorted(f.pins)},
        "init": f.coords(),
    }


def report_to_json(report: RelaxationReport, f: NetMap | None = None) -> dict:
    """Report fields plus the net's space, graph and pins, so it can be re-checked."""
    f = report.final if f is None else f
    return {
        "energy_trace": list(report.energy_trace),
        "residual": report.residual,
        "sweeps": report.sweeps,
        "terminated": report.terminated,
        "final": f.coords(),
        "residual_trace": list(report.residual_trace),
        "space": space_descriptor(f.space),
        "graph": f.graph.to_json(),
        "pins": {str(i): f.space.coords(f.image[i]) for i in sorted(f.pins)},
    }


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, data: dict) -> None:
    # repr-based float output is the shortest string that round-trips exactly
    atomic_write(path, json.dumps(data, indent=1) + "\n")


def trace_csv(report: RelaxationReport) -> str:
    """Rows ``sweep,energy,residual``: the state after each full sweep."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["sweep", "energy", "residual"])
    for k, r in enumerate(report.residual_trace):
        writer.writerow([k, repr(report.energy_trace[2 * k]), repr(r)])
    return out.getvalue()


def polyline_csv(space: MetricSpace, points) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for p in points:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in space.coords(p)])
    return out.getvalue()
