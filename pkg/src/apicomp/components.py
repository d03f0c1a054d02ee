"""Turn method clusters into components and score them against labels.

A component's provided interface is a cluster's method set; its
implementation classes are the owners of those methods; its required
interface is every outside method directly invoked by a provided method
somewhere in the pruned corpus. Precision of a component is the share of
provided methods related (per externally supplied labels) to at least one
other provided method.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .clusterer import Cluster
from .trace_model import MethodRef, TraceCorpus


@dataclass(frozen=True)
class CallWitness:
    """One concrete invocation backing a required-interface entry."""

    app_id: str
    scenario_id: str
    caller: MethodRef


@dataclass
class Component:
    center: MethodRef
    provided_interface: frozenset[MethodRef]
    implementation_classes: frozenset[str]
    required_interface: frozenset[MethodRef]
    # First witnessing call edge per required method, for auditability.
    required_witnesses: dict[MethodRef, CallWitness] = field(default_factory=dict)


@dataclass(frozen=True)
class ComponentStats:
    count: int
    avg_interface_methods: float
    avg_component_classes: float


@dataclass(frozen=True)
class RelatednessLabels:
    """Symmetric 'functionally related' judgments; absent pairs are unrelated."""

    pairs: frozenset[frozenset[MethodRef]]

    def related(self, a: MethodRef, b: MethodRef) -> bool:
        return a != b and frozenset((a, b)) in self.pairs

    @classmethod
    def from_pairs(cls, pairs) -> "RelatednessLabels":
        collected = set()
        for a, b in pairs:
            if a != b:
                collected.add(frozenset((a, b)))
        return cls(frozenset(collected))

    @classmethod
    def load(cls, path: str | Path) -> "RelatednessLabels":
        """Read one related pair per line: ``a.b<TAB>c.d``; ``#`` comments."""
        pairs = []
        for line_no, raw in enumerate(
                Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = raw.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected two tab-separated methods")
            pairs.append((MethodRef.from_qualified(parts[0].strip()),
                          MethodRef.from_qualified(parts[1].strip())))
        return cls.from_pairs(pairs)


def _call_edges(corpus: TraceCorpus) -> dict[tuple[MethodRef, MethodRef], CallWitness]:
    """Directed parent-child method edges with their first witness, in
    deterministic corpus order. Connector edges are not calls."""
    edges: dict[tuple[MethodRef, MethodRef], CallWitness] = {}
    for app_id, trees in corpus.trees.items():
        for tree in trees:
            for node in tree.nodes():
                if node.method is None:
                    continue
                for child in node.children:
                    key = (node.method, child.method)
                    if key not in edges:
                        edges[key] = CallWitness(app_id, tree.scenario_id, node.method)
    return edges


def assemble(clusters: list[Cluster], corpus: TraceCorpus) -> list[Component]:
    """Build one component per cluster, preserving cluster order."""
    edges = _call_edges(corpus)
    components = []
    for c in clusters:
        provided = frozenset(c.members)
        witnesses: dict[MethodRef, CallWitness] = {}
        for (caller, callee), witness in edges.items():
            if caller in provided and callee not in provided:
                witnesses.setdefault(callee, witness)
        components.append(Component(
            center=c.center,
            provided_interface=provided,
            implementation_classes=frozenset(m.class_name for m in provided),
            required_interface=frozenset(witnesses),
            required_witnesses=dict(sorted(witnesses.items())),
        ))
    return components


def component_stats(components: list[Component]) -> ComponentStats:
    if not components:
        return ComponentStats(0, 0.0, 0.0)
    n = len(components)
    return ComponentStats(
        count=n,
        avg_interface_methods=sum(len(c.provided_interface) for c in components) / n,
        avg_component_classes=sum(len(c.implementation_classes) for c in components) / n,
    )


def precision(component: Component, labels: RelatednessLabels) -> float:
    """Share of provided methods related to another method of the same
    interface; raises on an empty interface."""
    provided = sorted(component.provided_interface)
    if not provided:
        raise ValueError("cannot score a component with an empty interface")
    related = sum(
        1 for m in provided
        if any(labels.related(m, other) for other in provided if other != m))
    return related / len(provided)
