"""Build and render run reports.

A run produces a machine-readable ``report.json`` and a human-readable
``report.txt``. The JSON layout (schema ``apicomp-report/1``) is documented
in the README; evaluation against relatedness labels adds a separate
``evaluation.json``/``evaluation.txt`` pair (schema ``apicomp-evaluation/1``).
Reports carry no timestamps: identical inputs and configuration must
produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .components import Component, RelatednessLabels, component_stats, precision
from .graph_builder import ApiGraph
from .trace_model import TraceCorpus, tree_stats

REPORT_SCHEMA = "apicomp-report/1"
EVALUATION_SCHEMA = "apicomp-evaluation/1"


def _stats_rows(corpus: TraceCorpus) -> list[dict]:
    rows = []
    for app_id in sorted(corpus.trees):
        for tree in corpus.trees[app_id]:
            s = tree_stats(tree)
            rows.append({
                "app": app_id,
                "scenario": tree.scenario_id,
                "nodes": s.nodes,
                "unique_api_methods": s.unique_api_methods,
                "height": s.height,
                "min_repetition": s.min_repetition,
                "max_repetition": s.max_repetition,
                "avg_repetition": s.avg_repetition,
            })
    rows.sort(key=lambda r: (r["app"], r["scenario"]))
    return rows


def _component_entries(components: list[Component]) -> list[dict]:
    provider_ids: dict[object, list[int]] = {}
    for idx, comp in enumerate(components):
        for method in comp.provided_interface:
            provider_ids.setdefault(method, []).append(idx)

    entries = []
    for idx, comp in enumerate(components):
        required = []
        for method in sorted(comp.required_interface):
            witness = comp.required_witnesses[method]
            required.append({
                "method": method.qualified,
                "provided_by": provider_ids.get(method, []),
                "witness": {
                    "app": witness.app_id,
                    "scenario": witness.scenario_id,
                    "caller": witness.caller.qualified,
                },
            })
        entries.append({
            "id": idx,
            "center": comp.center.qualified,
            "provided_interface": sorted(m.qualified for m in comp.provided_interface),
            "implementation_classes": sorted(comp.implementation_classes),
            "required_interface": required,
        })
    return entries


def build_report(config_echo: dict, corpus: TraceCorpus,
                 pruned: TraceCorpus | None, graph: ApiGraph | None,
                 components: list[Component]) -> dict:
    """Assemble the full run report; pass None stages for an empty corpus."""
    stats = component_stats(components)
    return {
        "schema": REPORT_SCHEMA,
        "config": dict(config_echo),
        "corpus": {
            "apps": len(corpus.trees),
            "trees": corpus.tree_count(),
            "empty": corpus.is_empty(),
        },
        "call_tree_stats": _stats_rows(corpus),
        "pruned_tree_stats": _stats_rows(pruned) if pruned is not None else [],
        "graph": {
            "vertices": len(graph) if graph is not None else 0,
            "edges": graph.edge_count() if graph is not None else 0,
        },
        "components": _component_entries(components),
        "component_stats": {
            "count": stats.count,
            "avg_interface_methods": stats.avg_interface_methods,
            "avg_component_classes": stats.avg_component_classes,
            "empty": stats.count == 0,
        },
    }


def _stats_table(rows: list[dict]) -> list[str]:
    if not rows:
        return ["  (none)"]
    header = ("app", "scenario", "nodes", "unique_api", "height",
              "min_rep", "max_rep", "avg_rep")
    table = [tuple(str(r[k]) if not isinstance(r[k], float) else f"{r[k]:g}"
                   for k in ("app", "scenario", "nodes", "unique_api_methods",
                             "height", "min_repetition", "max_repetition",
                             "avg_repetition"))
             for r in rows]
    widths = [max(len(h), *(len(row[i]) for row in table))
              for i, h in enumerate(header)]
    lines = ["  " + "  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    for row in table:
        lines.append("  " + "  ".join(c.ljust(widths[i]) for i, c in enumerate(row)))
    return lines


def render_report_text(report: dict) -> str:
    lines = ["API COMPONENT REPORT", "====================", ""]

    lines.append("Configuration")
    for key in sorted(report["config"]):
        lines.append(f"  {key}: {report['config'][key]}")
    lines.append("")

    corpus = report["corpus"]
    lines.append("Corpus")
    lines.append(f"  applications: {corpus['apps']}")
    lines.append(f"  call trees:   {corpus['trees']}")
    if corpus["empty"]:
        lines.append("  (empty corpus: nothing to analyze)")
        lines.append("")
        return "\n".join(lines)
    lines.append("")

    lines.append("Call trees (as recorded)")
    lines.extend(_stats_table(report["call_tree_stats"]))
    lines.append("")
    lines.append("Call trees (pruned)")
    lines.extend(_stats_table(report["pruned_tree_stats"]))
    lines.append("")

    lines.append("Method graph")
    lines.append(f"  vertices: {report['graph']['vertices']}")
    lines.append(f"  edges:    {report['graph']['edges']}")
    lines.append("")

    comps = report["components"]
    lines.append(f"Components ({len(comps)})")
    if not comps:
        lines.append("  (none)")
    for comp in comps:
        lines.append(f"  [{comp['id']}] center: {comp['center']}")
        provided = comp["provided_interface"]
        lines.append(f"      provided ({len(provided)}): {', '.join(provided)}")
        classes = comp["implementation_classes"]
        lines.append(f"      classes ({len(classes)}): {', '.join(classes)}")
        required = comp["required_interface"]
        if required:
            lines.append(f"      required ({len(required)}):")
            for item in required:
                owners = ",".join(str(i) for i in item["provided_by"]) or "-"
                w = item["witness"]
                lines.append(
                    f"        {item['method']} (components [{owners}]; "
                    f"first call by {w['caller']} in {w['app']}/{w['scenario']})")
        else:
            lines.append("      required (0): none")
    lines.append("")

    stats = report["component_stats"]
    lines.append("Component stats")
    if stats["empty"]:
        lines.append("  (no components identified)")
    lines.append(f"  components: {stats['count']}")
    lines.append(f"  avg interface size (methods): {stats['avg_interface_methods']:g}")
    lines.append(f"  avg component size (classes): {stats['avg_component_classes']:g}")
    lines.append("")
    return "\n".join(lines)


def write_report(report: dict, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "report.txt").write_text(render_report_text(report),
                                        encoding="utf-8")


def build_evaluation(report: dict, labels: RelatednessLabels) -> dict:
    """Score every reported component against the relatedness labels."""
    from .trace_model import MethodRef

    rows = []
    total = 0.0
    for comp in report["components"]:
        methods = frozenset(MethodRef.from_qualified(q)
                            for q in comp["provided_interface"])
        fake = Component(
            center=MethodRef.from_qualified(comp["center"]),
            provided_interface=methods,
            implementation_classes=frozenset(m.class_name for m in methods),
            required_interface=frozenset(),
        )
        value = precision(fake, labels)
        total += value
        rows.append({
            "id": comp["id"],
            "center": comp["center"],
            "methods": len(methods),
            "precision": value,
        })
    mean = total / len(rows) if rows else 0.0
    return {
        "schema": EVALUATION_SCHEMA,
        "components": rows,
        "mean_precision": mean,
    }


def render_evaluation_text(evaluation: dict) -> str:
    lines = ["COMPONENT EVALUATION", "====================", ""]
    if not evaluation["components"]:
        lines.append("(no components to evaluate)")
    for row in evaluation["components"]:
        lines.append(f"  [{row['id']}] center={row['center']} "
                     f"methods={row['methods']} precision={row['precision']:.6f}")
    lines.append("")
    lines.append(f"mean precision: {evaluation['mean_precision']:.6f}")
    lines.append("")
    return "\n".join(lines)


def write_evaluation(evaluation: dict, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "evaluation.json").write_text(
        json.dumps(evaluation, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "evaluation.txt").write_text(render_evaluation_text(evaluation),
                                            encoding="utf-8")
