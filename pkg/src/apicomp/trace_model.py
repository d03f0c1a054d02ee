"""Call-tree trace model: data types, parsing, classification, statistics.

Trace files are UTF-8 text with one call event per line:

    <depth><TAB><class_name>.<method_name>[<TAB>API|APP]

Depths form a pre-order depth-first walk: the first event is the root at
depth 0 and every other event is at most one level deeper than the event
before it. The last ``.``-separated segment of the qualified name is the
method name; everything before it is the class name. The optional third
column pins a node's origin regardless of any classifier. Lines starting
with ``#`` and blank lines are ignored.

A corpus directory holds one subdirectory per application (the directory
name is the application id); every ``*.trace`` file inside is one recorded
usage scenario (the file stem is the scenario id).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

# Root marker used when serializing trees whose original root was removed
# by pruning. Recognized by the parser only at depth 0; it cannot collide
# with a real method because it contains no ".".
CONNECTOR_TOKEN = "<connector>"


class TraceParseError(Exception):
    """Malformed trace or classifier input."""

    def __init__(self, message: str, *, path: str | None = None,
                 line_no: int | None = None) -> None:
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = str(path)
        if line_no is not None:
            where = f"{where}:{line_no}" if where else f"line {line_no}"
        super().__init__(f"{where}: {message}" if where else message)


class Origin(enum.Enum):
    """Whether a call event belongs to the client application or the API."""

    APPLICATION = "APP"
    API = "API"


@dataclass(frozen=True, order=True)
class MethodRef:
    """Fully qualified method identity; equality is by (class, method)."""

    class_name: str
    method_name: str

    def __post_init__(self) -> None:
        if not self.class_name or not self.method_name:
            raise ValueError("class_name and method_name must be non-empty")

    @property
    def qualified(self) -> str:
        return f"{self.class_name}.{self.method_name}"

    @classmethod
    def from_qualified(cls, text: str) -> "MethodRef":
        class_part, sep, method = text.rpartition(".")
        if not sep or not class_part or not method:
            raise ValueError(f"not a qualified method name: {text!r}")
        return cls(class_part, method)

    def __str__(self) -> str:
        return self.qualified


@dataclass
class CallNode:
    """One call event. ``method is None`` marks the synthetic connector root.

    ``pinned`` carries a per-line API/APP override from the trace file;
    classification never changes a pinned node.
    """

    method: MethodRef | None
    origin: Origin = Origin.APPLICATION
    children: list["CallNode"] = field(default_factory=list)
    pinned: Origin | None = None

    @property
    def is_connector(self) -> bool:
        return self.method is None


@dataclass
class CallTree:
    """Rooted ordered tree of call events for one usage scenario."""

    app_id: str
    scenario_id: str
    root: CallNode

    def nodes(self) -> Iterator[CallNode]:
        """All nodes in pre-order, including a connector root if present."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def method_nodes(self) -> Iterator[CallNode]:
        """Pre-order nodes that carry a method (connector excluded)."""
        for node in self.nodes():
            if node.method is not None:
                yield node

    def node_count(self) -> int:
        return sum(1 for _ in self.method_nodes())

    def edge_count(self) -> int:
        """Method-to-method invocation edges; connector edges do not count."""
        total = 0
        for node in self.nodes():
            if not node.is_connector:
                total += len(node.children)
        return total

    def depth(self) -> int:
        """Edges on the longest root-to-leaf path (connector root included)."""
        deepest = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            if d > deepest:
                deepest = d
            for child in node.children:
                stack.append((child, d + 1))
        return deepest


@dataclass
class PrunedTree(CallTree):
    """A call tree whose application frames have been removed (see pruner)."""


@dataclass
class TraceCorpus:
    """All call trees of all applications; the universe the metrics average over."""

    trees: dict[str, list[CallTree]]

    def __post_init__(self) -> None:
        for app_id, app_trees in self.trees.items():
            for tree in app_trees:
                if tree.app_id != app_id:
                    raise ValueError(
                        f"tree app_id {tree.app_id!r} filed under {app_id!r}")

    @property
    def apps(self) -> list[str]:
        return list(self.trees)

    def all_trees(self) -> Iterator[CallTree]:
        for app_trees in self.trees.values():
            yield from app_trees

    def tree_count(self) -> int:
        return sum(len(ts) for ts in self.trees.values())

    def is_empty(self) -> bool:
        return not self.trees


@dataclass(frozen=True)
class ApiClassifier:
    """Prefix list deciding which classes belong to the API under study.

    A method is API iff its class name starts with any listed prefix
    (plain text prefix comparison). An empty prefix matches everything.
    """

    api_prefixes: tuple[str, ...]

    def is_api(self, class_name: str) -> bool:
        return any(class_name.startswith(p) for p in self.api_prefixes)

    @classmethod
    def match_all(cls) -> "ApiClassifier":
        return cls(("",))

    @classmethod
    def load(cls, path: str | Path) -> "ApiClassifier":
        prefixes = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            prefixes.append(line)
        return cls(tuple(prefixes))


@dataclass(frozen=True)
class TraceStats:
    """Per-tree summary: size, distinct API methods, height, repetitions."""

    nodes: int
    unique_api_methods: int
    height: int
    min_repetition: int
    max_repetition: int
    avg_repetition: float


def parse_trace_file(text: str, app_id: str, scenario_id: str, *,
                     path: str | None = None) -> CallTree:
    """Parse one trace file into a call tree.

    Nodes without an explicit API/APP column default to APPLICATION origin
    until ``classify`` is applied.

    Raises:
        TraceParseError: empty input, bad depth sequence, unparsable names.
    """
    root: CallNode | None = None
    # Ancestor chain of the previous event as (depth, node) pairs.
    chain: list[tuple[int, CallNode]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue

        def fail(message: str) -> TraceParseError:
            return TraceParseError(message, path=path, line_no=line_no)

        parts = raw.split("\t")
        if len(parts) < 2:
            raise fail("expected <depth><TAB><class.method>")
        try:
            depth = int(parts[0].strip())
        except ValueError:
            raise fail(f"invalid depth {parts[0].strip()!r}") from None
        if depth < 0:
            raise fail(f"negative depth {depth}")

        name = parts[1].strip()
        pinned: Origin | None = None
        if len(parts) >= 3:
            token = parts[2].strip()
            if token == "API":
                pinned = Origin.API
            elif token == "APP":
                pinned = Origin.APPLICATION
            elif token:
                raise fail(f"unknown origin override {token!r}")
            if len(parts) > 3 and any(p.strip() for p in parts[3:]):
                raise fail("unexpected trailing fields")

        if name == CONNECTOR_TOKEN:
            if depth != 0 or root is not None:
                raise fail("connector marker is only valid as the root event")
            node = CallNode(None, Origin.API)
        else:
            try:
                method = MethodRef.from_qualified(name)
            except ValueError as exc:
                raise fail(str(exc)) from None
            node = CallNode(method, pinned or Origin.APPLICATION, pinned=pinned)

        if root is None:
            if depth != 0:
                raise fail(f"first event must have depth 0, got {depth}")
            root = node
            chain = [(0, node)]
            continue
        if depth == 0:
            raise fail("second depth-0 event; a scenario has a single root")
        while chain and chain[-1][0] >= depth:
            chain.pop()
        if not chain or chain[-1][0] != depth - 1:
            raise fail(f"depth jump to {depth} with no open parent at depth {depth - 1}")
        chain[-1][1].children.append(node)
        chain.append((depth, node))

    if root is None:
        raise TraceParseError("no call events in trace", path=path)
    return CallTree(app_id, scenario_id, root)


def serialize_tree(tree: CallTree) -> str:
    """Render a call tree back to the trace file format (pre-order)."""
    lines: list[str] = []
    stack: list[tuple[CallNode, int]] = [(tree.root, 0)]
    while stack:
        node, depth = stack.pop()
        if node.is_connector:
            lines.append(f"{depth}\t{CONNECTOR_TOKEN}")
        elif node.pinned is not None:
            lines.append(f"{depth}\t{node.method.qualified}\t{node.pinned.value}")
        else:
            lines.append(f"{depth}\t{node.method.qualified}")
        for child in reversed(node.children):
            stack.append((child, depth + 1))
    return "\n".join(lines) + "\n"


def _classified_origin(node: CallNode, classifier: ApiClassifier) -> Origin:
    if node.is_connector:
        return Origin.API
    if node.pinned is not None:
        return node.pinned
    if classifier.is_api(node.method.class_name):
        return Origin.API
    return Origin.APPLICATION


def classify(tree: CallTree, classifier: ApiClassifier) -> CallTree:
    """Return a copy with every node's origin recomputed from the classifier.

    Pinned nodes keep their pinned origin; tree shape is unchanged and the
    operation is idempotent.
    """
    new_root = CallNode(tree.root.method, _classified_origin(tree.root, classifier),
                        [], tree.root.pinned)
    stack = [(tree.root, new_root)]
    while stack:
        old, new = stack.pop()
        for child in old.children:
            copy = CallNode(child.method, _classified_origin(child, classifier),
                            [], child.pinned)
            new.children.append(copy)
            stack.append((child, copy))
    return type(tree)(tree.app_id, tree.scenario_id, new_root)


def tree_stats(tree: CallTree) -> TraceStats:
    """Summarize a classified tree.

    ``nodes`` counts method nodes only. ``height`` is the longest chain of
    method invocations, so a synthetic connector root does not add a level.
    Repetition counts cover distinct API-origin methods; a tree without API
    nodes reports zero repetitions.
    """
    repetitions = Counter(
        node.method for node in tree.method_nodes() if node.origin is Origin.API)
    height = tree.depth()
    if tree.root.is_connector and height > 0:
        height -= 1
    if not repetitions:
        return TraceStats(tree.node_count(), 0, height, 0, 0, 0.0)
    counts = repetitions.values()
    return TraceStats(
        nodes=tree.node_count(),
        unique_api_methods=len(repetitions),
        height=height,
        min_repetition=min(counts),
        max_repetition=max(counts),
        avg_repetition=sum(counts) / len(repetitions),
    )


def load_corpus(corpus_dir: str | Path, classifier: ApiClassifier | None = None,
                mapper: Callable[..., Iterable] = map) -> TraceCorpus:
    """Load a corpus directory; one subdirectory per app, ``*.trace`` scenarios.

    When a classifier is given every tree is classified on load. ``mapper``
    may be a thread pool's ``map``; files are parsed independently and the
    result order is fixed by the sorted directory listing.
    """
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus_dir}")

    jobs: list[tuple[str, Path]] = []
    for app_dir in sorted(p for p in corpus_dir.iterdir() if p.is_dir()):
        for trace_path in sorted(app_dir.glob("*.trace")):
            jobs.append((app_dir.name, trace_path))

    def parse_one(job: tuple[str, Path]) -> CallTree:
        app_id, trace_path = job
        tree = parse_trace_file(trace_path.read_text(encoding="utf-8"),
                                app_id, trace_path.stem, path=str(trace_path))
        if classifier is not None:
            tree = classify(tree, classifier)
        return tree

    trees: dict[str, list[CallTree]] = {}
    for (app_id, _), tree in zip(jobs, mapper(parse_one, jobs)):
        trees.setdefault(app_id, []).append(tree)
    return TraceCorpus(trees)


def write_corpus(corpus: TraceCorpus, out_dir: str | Path) -> None:
    """Write a corpus as a directory tree in the trace file format."""
    out_dir = Path(out_dir)
    for app_id, app_trees in corpus.trees.items():
        app_dir = out_dir / app_id
        app_dir.mkdir(parents=True, exist_ok=True)
        for tree in app_trees:
            (app_dir / f"{tree.scenario_id}.trace").write_text(
                serialize_tree(tree), encoding="utf-8")
