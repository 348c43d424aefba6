"""Problem-file ingestion: a TOML document describing one field theory
plus an optional candidate section.

    schema = 1
    formalism = "lagrangian"        # or "hamiltonian"
    m = 2
    n = 1
    expression = "1/2*(v1_1^2 - v1_2^2) - 1/2*y1^2"
    parameters = { k1 = 1.25, k2 = 0.75 }   # or a bare list of names

    [section]                        # optional candidate section
    y1 = "cos(k1*x1 - k2*x2)"
    # p1_1 = "..."                   # momenta, for hamiltonian checks
    # grid = "path/to/file.grid"     # alternatively a serialized grid

    [section.axes]
    n = 129
    h = 0.0078125
    x0 = 0.0
"""

from __future__ import annotations

from dataclasses import dataclass, field

try:
    import tomllib as tomli
except ModuleNotFoundError:
    import tomli

from .chart import ChartSpec
from .expressions import Expr, ExprError, parse
from .numeric import Axis

LAGRANGIAN = "lagrangian"
HAMILTONIAN = "hamiltonian"


class ProblemError(Exception):
    pass


@dataclass
class SectionSpec:
    y_exprs: dict = None  # fiber index -> Expr
    p_exprs: dict = None  # (fiber, mu) -> Expr
    grid_path: str = None
    axes: tuple = None


@dataclass
class ProblemFile:
    chart: ChartSpec
    formalism: str
    expression: Expr
    expression_text: str
    parameters: list
    parameter_values: dict
    section: SectionSpec = None


def _axes_from_table(m, table):
    ns = table.get("n", 65)
    hs = table.get("h")
    x0s = table.get("x0", 0.0)
    if hs is None:
        raise ProblemError("section axes need a spacing 'h'")

    def per_axis(val, cast):
        if isinstance(val, list):
            if len(val) != m:
                raise ProblemError(f"axis list must have {m} entries")
            return [cast(v) for v in val]
        return [cast(val)] * m

    return tuple(
        Axis(n=n, h=h, x0=x0)
        for n, h, x0 in zip(per_axis(ns, int), per_axis(hs, float), per_axis(x0s, float))
    )


def load_problem(path):
    try:
        with open(path, "rb") as f:
            doc = tomli.load(f)
    except FileNotFoundError:
        raise ProblemError(f"problem file not found: {path}")
    except tomli.TOMLDecodeError as e:
        raise ProblemError(f"problem file is not valid TOML: {e}")
    return problem_from_dict(doc)


def problem_from_dict(doc):
    if doc.get("schema") != 1:
        raise ProblemError("problem file must declare schema = 1")
    formalism = doc.get("formalism")
    if formalism not in (LAGRANGIAN, HAMILTONIAN):
        raise ProblemError("formalism must be 'lagrangian' or 'hamiltonian'")
    try:
        chart = ChartSpec(int(doc["m"]), int(doc["n"]))
    except (KeyError, ValueError, TypeError) as e:
        raise ProblemError(f"bad chart dimensions: {e}")

    raw_params = doc.get("parameters", [])
    if isinstance(raw_params, dict):
        parameters = sorted(raw_params)
        parameter_values = {k: float(v) for k, v in raw_params.items()}
    elif isinstance(raw_params, list):
        parameters = list(raw_params)
        parameter_values = {}
    else:
        raise ProblemError("parameters must be a list of names or a name = value table")

    text = doc.get("expression")
    if not isinstance(text, str):
        raise ProblemError("missing expression string")
    try:
        expr = parse(text, chart, parameters)
    except ExprError as e:
        raise ProblemError(f"expression does not parse: {e}")
    banned = set(chart.w_names())
    banned |= set(chart.p_names() if formalism == LAGRANGIAN else chart.v_names())
    bad = sorted(expr.free_symbols() & banned)
    if bad:
        raise ProblemError(
            f"{formalism} expression uses forbidden coordinates: {', '.join(bad)}"
        )

    section = None
    if "section" in doc:
        sec = doc["section"]
        if not isinstance(sec, dict):
            raise ProblemError("[section] must be a table")
        grid_path = sec.get("grid")
        y_exprs = {}
        p_exprs = {}
        allowed = set(chart.x_names()) | set(parameters)
        for key, val in sec.items():
            if key in ("grid", "axes"):
                continue
            try:
                e = parse(val, chart, parameters)
            except ExprError as err:
                raise ProblemError(f"section entry {key} does not parse: {err}")
            extra = sorted(e.free_symbols() - allowed)
            if extra:
                raise ProblemError(
                    f"section entry {key} may reference only base coordinates and "
                    f"parameters; found {', '.join(extra)}"
                )
            matched = False
            for a in chart.fibers():
                if key == chart.y(a):
                    y_exprs[a] = e
                    matched = True
                for mu in chart.mus():
                    if key == chart.p(a, mu):
                        p_exprs[(a, mu)] = e
                        matched = True
            if not matched:
                raise ProblemError(f"unknown section field '{key}'")
        axes = None
        if "axes" in sec:
            axes = _axes_from_table(chart.m, sec["axes"])
        if grid_path is None:
            missing = [chart.y(a) for a in chart.fibers() if a not in y_exprs]
            if missing:
                raise ProblemError(
                    f"section is missing field expressions: {', '.join(missing)}"
                )
        section = SectionSpec(
            y_exprs=y_exprs or None,
            p_exprs=p_exprs or None,
            grid_path=grid_path,
            axes=axes,
        )

    return ProblemFile(
        chart=chart,
        formalism=formalism,
        expression=expr,
        expression_text=text,
        parameters=parameters,
        parameter_values=parameter_values,
        section=section,
    )
