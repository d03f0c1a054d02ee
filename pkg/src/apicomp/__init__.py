"""apicomp: identify reusable components of an object-oriented API from
execution traces of its client applications.

Pipeline: parse trace corpora into call trees, prune application frames,
score method-pair affinity (frequency, distance, weight), build a weighted
method graph, extract overlapping clusters as component provided
interfaces, and report components with their implementation classes and
required interfaces.
"""

from .clusterer import (Cluster, ClusterConfig, CoverState, WsGraph, cluster,
                        initial_clusters, refine_clusters, relative_compactness,
                        relative_density, star, ws_quality)
from .components import (CallWitness, Component, ComponentStats,
                         RelatednessLabels, assemble, component_stats, precision)
from .graph_builder import (ApiGraph, GraphConfig, build_graph, read_edge_list,
                            write_dot, write_edge_list)
from .metrics import (CorpusMetrics, MetricConfig, PairAffinity, QualityWeights,
                      average_path_length, call_dist, call_freq, call_weight,
                      co_occur, distance, global_freq, local_freq, pair_distance,
                      pair_weight, quality, weight)
from .pipeline import RunConfig, run_pipeline
from .pruner import prune, prune_corpus
from .report import build_evaluation, build_report, render_report_text
from .synth import PlantSpec, generate, load_ground_truth, write_generated
from .trace_model import (ApiClassifier, CallNode, CallTree, MethodRef, Origin,
                          PrunedTree, TraceCorpus, TraceParseError, TraceStats,
                          classify, load_corpus, parse_trace_file, serialize_tree,
                          tree_stats, write_corpus)

__version__ = "0.1.0"
