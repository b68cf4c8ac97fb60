"""Weight modules of the Witt algebra with one-dimensional weight spaces.

A module is described by its action coefficients: W_m·v_i = a(m, i)·v_{m+i}.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Literal, Mapping, Optional

import networkx as nx

from gal.schemas import (
    FamilyModuleSpec,
    FromStructureModuleSpec,
    IndecomposabilityReport,
    IntertwinerInfeasibility,
    IntertwinerWitness,
    LawReport,
    ModuleSpec,
    TableModuleSpec,
    VAlphaBetaModuleSpec,
    VAlphaModuleSpec,
    VBetaModuleSpec,
    Violation,
)
from gal.witt_core import GradedStructure, Window, phi_eval, structure_from_spec

LOG = logging.getLogger(__name__)

ModuleKind = Literal["valpha", "vbeta", "valphabeta", "from-structure", "table"]


class ModuleError(ValueError):
    pass


class WeightCollisionError(ModuleError):
    def __init__(self, i: int, j: int, weight: Fraction):
        self.i, self.j, self.weight = i, j, weight
        super().__init__(f"basis vectors {i} and {j} share the weight {weight}")


@dataclass(frozen=True, eq=False)
class WeightModule:
    kind: ModuleKind
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    structure: Optional[GradedStructure] = None
    window: Optional[Window] = None
    entries: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def coefficient(self, m: int, i: int) -> Fraction:
        if self.kind == "valpha":
            if i == 0:
                return m * (self.alpha + m)
            return Fraction(m + i)
        if self.kind == "vbeta":
            if m + i == 0:
                return -m * (self.beta + m)
            return Fraction(i)
        if self.kind == "valphabeta":
            return self.alpha + i + m * self.beta
        if self.kind == "from-structure":
            return -phi_eval(self.structure, m, i)
        if not self.window.contains(m, i, m + i):
            raise ModuleError(f"coefficient a({m}, {i}) is outside the module window of radius {self.window.radius}")
        return self.entries.get((m, i), Fraction(0))

    def weight(self, i: int) -> Fraction:
        return self.coefficient(0, i)

    def describe(self) -> str:
        if self.kind == "valpha":
            return f"V_α(α={self.alpha})"
        if self.kind == "vbeta":
            return f"V^β(β={self.beta})"
        if self.kind == "valphabeta":
            return f"V_α,β(α={self.alpha}, β={self.beta})"
        if self.kind == "from-structure":
            return f"module of {self.structure.describe()}"
        return f"module table on radius {self.window.radius}"


def module_weights(module: WeightModule, w: Window) -> dict[int, Fraction]:
    return {i: module.weight(i) for i in w.indices}


def _check_distinct_weights(module: WeightModule, w: Window):
    seen: dict[Fraction, int] = {}
    for i, weight in module_weights(module, w).items():
        if weight in seen:
            raise WeightCollisionError(seen[weight], i, weight)
        seen[weight] = i


def valpha(alpha) -> WeightModule:
    return WeightModule("valpha", alpha=Fraction(alpha))


def vbeta(beta) -> WeightModule:
    return WeightModule("vbeta", beta=Fraction(beta))


def valphabeta(alpha, beta) -> WeightModule:
    return WeightModule("valphabeta", alpha=Fraction(alpha), beta=Fraction(beta))


def from_structure(s: GradedStructure) -> WeightModule:
    """The module on u_n := W_n with W_m·u_n = −W_m∘W_n."""
    if s.kind == "symbolic" and not s.is_evaluable:
        raise ModuleError(f"structure has unbound parameters {', '.join(s.free_params)}")
    return WeightModule("from-structure", structure=s)


def module_table(window: Window, entries: Mapping[tuple[int, int], Fraction]) -> WeightModule:
    for m, i in entries:
        if not window.contains(m, i, m + i):
            raise ModuleError(f"entry ({m}, {i}) is outside the module window of radius {window.radius}")
    return WeightModule("table", window=window, entries={key: Fraction(v) for key, v in entries.items()})


def build_module(spec: ModuleSpec, w: Optional[Window] = None) -> WeightModule:
    if isinstance(spec, FamilyModuleSpec):
        spec = {
            "valpha": lambda: VAlphaModuleSpec(alpha=spec.alpha),
            "vbeta": lambda: VBetaModuleSpec(beta=spec.beta),
            "valphabeta": lambda: VAlphaBetaModuleSpec(alpha=spec.alpha, beta=spec.beta),
        }[spec.family]()
    if isinstance(spec, VAlphaModuleSpec):
        module = valpha(spec.alpha)
    elif isinstance(spec, VBetaModuleSpec):
        module = vbeta(spec.beta)
    elif isinstance(spec, VAlphaBetaModuleSpec):
        module = valphabeta(spec.alpha, spec.beta)
    elif isinstance(spec, FromStructureModuleSpec):
        module = from_structure(structure_from_spec(spec.structure))
    elif isinstance(spec, TableModuleSpec):
        entries: dict[tuple[int, int], Fraction] = {}
        for entry in spec.entries:
            entries[(entry.m, entry.i)] = entry.value
        return module_table(Window(spec.window), entries)
    else:
        raise ModuleError(f"unsupported module description {spec!r}")
    if w is not None:
        _check_distinct_weights(module, w)
    return module


def _axiom_instances(w: Window):
    for m, n, i in product(w.indices, repeat=3):
        yield (m, n, i), w.contains(m + i, n + i, m + n, m + n + i)


def check_module_axiom(module: WeightModule, w: Window) -> LawReport:
    """Residual a(n,i)a(m,n+i) − a(m,i)a(n,m+i) − (n−m)a(m+n,i) on every in-window (m, n, i)."""
    a = module.coefficient
    violations: list[Violation] = []
    checked = skipped = 0
    for (m, n, i), inside in _axiom_instances(w):
        if not inside:
            skipped += 1
            continue
        checked += 1
        residual = a(n, i) * a(m, n + i) - a(m, i) * a(n, m + i) - (n - m) * a(m + n, i)
        if residual:
            violations.append(Violation(m=m, n=n, i=i, residual=residual, clause="module-axiom"))
    LOG.info("module axiom on %s: %d checked, %d violations", module.describe(), checked, len(violations))
    return LawReport(
        law="module-axiom",
        window=w.radius,
        checked=checked,
        skipped=skipped,
        violations=violations,
        passed=not violations,
    )


def check_indecomposable(module: WeightModule, w: Window) -> IndecomposabilityReport:
    """Connectivity of the weight graph; edge {i, m+i} whenever a(m,i) ≠ 0."""
    graph = nx.Graph()
    graph.add_nodes_from(w.indices)
    for m, i in product(w.indices, repeat=2):
        if m == 0 or not w.contains(m + i):
            continue
        if module.coefficient(m, i) != 0:
            graph.add_edge(i, m + i)
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    LOG.debug("weight graph: %d edges, %d components", graph.number_of_edges(), len(components))
    return IndecomposabilityReport(window=w.radius, indecomposable=len(components) == 1, components=components)


# intertwiners


def _find_shift(a: WeightModule, b: WeightModule, w: Window) -> Optional[int]:
    target = a.weight(0)
    for k in sorted(w.indices, key=lambda k: (abs(k), -k)):
        if b.weight(k) != target:
            continue
        if all(a.weight(i) == b.weight(i + k) for i in w.indices if w.contains(i + k)):
            return k
        LOG.debug("shift %d matches at 0 but not across the window", k)
    return None


class _Infeasible(Exception):
    def __init__(self, detail: IntertwinerInfeasibility):
        self.detail = detail


def _propagate(
    instances: list[tuple[int, int, Fraction, Fraction]], coeffs: dict[int, Fraction]
) -> None:
    """Close coeffs under x·c_j = c_i·y for each (m, i, x, y) with j = m + i."""
    changed = True
    while changed:
        changed = False
        for m, i, x, y in instances:
            j = m + i
            ci, cj = coeffs.get(i), coeffs.get(j)
            if ci is not None and cj is not None:
                if x * cj != ci * y:
                    found = ci * y / x if x else None
                    raise _Infeasible(
                        IntertwinerInfeasibility(reason="inconsistent", m=m, i=i, index=j, expected=cj, found=found)
                    )
            elif ci is not None:
                if x:
                    value = ci * y / x
                    if value == 0:
                        raise _Infeasible(IntertwinerInfeasibility(reason="forced-zero", m=m, i=i, index=j, found=value))
                    coeffs[j] = value
                    changed = True
                elif y:
                    raise _Infeasible(
                        IntertwinerInfeasibility(reason="forced-zero", m=m, i=i, index=i, expected=ci, found=Fraction(0))
                    )
            elif cj is not None:
                if y:
                    value = x * cj / y
                    if value == 0:
                        raise _Infeasible(IntertwinerInfeasibility(reason="forced-zero", m=m, i=i, index=i, found=value))
                    coeffs[i] = value
                    changed = True
                elif x:
                    raise _Infeasible(
                        IntertwinerInfeasibility(reason="forced-zero", m=m, i=i, index=j, expected=cj, found=Fraction(0))
                    )


def find_intertwiner(a: WeightModule, b: WeightModule, w: Window) -> IntertwinerWitness:
    """Search for f(u_i) = c_i·v_{i+k} intertwining a with b on the window."""
    _check_distinct_weights(a, w)
    _check_distinct_weights(b, w)
    k = _find_shift(a, b, w)
    if k is None:
        LOG.info("no weight-preserving shift between %s and %s", a.describe(), b.describe())
        return IntertwinerWitness(
            window=w.radius, found=False, infeasible=IntertwinerInfeasibility(reason="no-shift")
        )
    domain = [i for i in w.indices if w.contains(i + k)]
    inside = set(domain)
    instances = [
        (m, i, a.coefficient(m, i), b.coefficient(m, i + k))
        for m, i in product(w.indices, domain)
        if m + i in inside
    ]
    coeffs: dict[int, Fraction] = {0: Fraction(1)}
    free: list[int] = []
    try:
        _propagate(instances, coeffs)
        while len(coeffs) < len(domain):
            index = next(i for i in domain if i not in coeffs)
            LOG.debug("c_%d is unconstrained; setting it to 1", index)
            coeffs[index] = Fraction(1)
            free.append(index)
            _propagate(instances, coeffs)
    except _Infeasible as err:
        LOG.info("no intertwiner with shift %d: %s", k, err.detail.reason)
        return IntertwinerWitness(window=w.radius, found=False, k=k, infeasible=err.detail)
    for m, i, x, y in instances:
        if x * coeffs[m + i] != coeffs[i] * y:
            raise AssertionError(f"intertwiner fails at m={m}, i={i} after propagation")
    return IntertwinerWitness(
        window=w.radius, found=True, k=k, coefficients=dict(sorted(coeffs.items())), free=free
    )
