"""Remove application frames from call trees.

Pruning walks the tree level by level: every APPLICATION child is removed
and its children are spliced into the parent's child list at the removed
child's position, preserving invocation order. Passes repeat until a full
sweep removes nothing. When the root itself is an application frame, a
synthetic connector root adopts the surviving top-level API subtrees so a
scenario stays a single tree.
"""

from __future__ import annotations

from collections import deque

from .trace_model import CallNode, CallTree, Origin, PrunedTree, TraceCorpus


def _copy_subtree(node: CallNode) -> CallNode:
    copy = CallNode(node.method, node.origin, [], node.pinned)
    stack = [(node, copy)]
    while stack:
        old, new = stack.pop()
        for child in old.children:
            child_copy = CallNode(child.method, child.origin, [], child.pinned)
            new.children.append(child_copy)
            stack.append((child, child_copy))
    return copy


def prune(tree: CallTree) -> PrunedTree:
    """Return the tree with every APPLICATION node removed.

    The result contains exactly the API nodes of the input, each keeping the
    subsequence of API ancestors it had before. A tree with no API nodes
    yields an empty pruned tree (connector root, zero children).
    """
    root = _copy_subtree(tree.root)
    # A connector wrapper lets the sweep below treat an application root
    # like any other removable child; it is unwrapped if the root survives.
    root_is_api = not root.is_connector and root.origin is Origin.API
    work = root if root.is_connector else CallNode(None, Origin.API, [root])

    changed = True
    while changed:
        changed = False
        queue = deque([work])
        while queue:
            node = queue.popleft()
            spliced: list[CallNode] = []
            for child in node.children:
                if child.origin is Origin.API:
                    spliced.append(child)
                else:
                    spliced.extend(child.children)
                    changed = True
            node.children = spliced
            queue.extend(spliced)

    if root_is_api:
        new_root = work.children[0]
    else:
        new_root = work
    return PrunedTree(tree.app_id, tree.scenario_id, new_root)


def prune_corpus(corpus: TraceCorpus, mapper=map) -> TraceCorpus:
    """Prune every tree of a corpus; trees are independent, so ``mapper``
    may be a thread pool's ``map``."""
    order = [(app_id, tree) for app_id, ts in corpus.trees.items() for tree in ts]
    pruned = mapper(lambda item: prune(item[1]), order)
    trees: dict[str, list[CallTree]] = {}
    for (app_id, _), tree in zip(order, pruned):
        trees.setdefault(app_id, []).append(tree)
    return TraceCorpus(trees)
