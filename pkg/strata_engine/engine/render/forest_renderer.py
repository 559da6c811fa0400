"""
Forest Renderer for the strata engine

Draws marked forests with GraphViz: one cluster per forest, vertices labeled
by eta, vertices of equal height on one rank.
"""

from typing import Iterable, List, Optional

import graphviz

from ..combinatorics.forests import ForestNode, MarkedForest, format_forest
from . import logger


class ForestRenderer:
    """
    Renders (lambda, mu)-forests as a GraphViz digraph.

    Roots sit on the top rank, leaves on the bottom rank. Each forest gets
    its own cluster titled by its text form; ``highlight`` fills the nodes of
    one forest (e.g. the apex of a cone).
    """

    def render_forests(self, forests: Iterable[MarkedForest], title: Optional[str] = None,
                       highlight: Optional[MarkedForest] = None) -> graphviz.Digraph:
        """
        Render a list of forests side by side.

        Args:
            forests (Iterable[MarkedForest]): Forests to draw, in display order
            title (Optional[str]): Graph label
            highlight (Optional[MarkedForest]): Forest drawn with a colored fill

        Returns:
            graphviz.Digraph: The graph (call ``.source`` or ``.render``)
        """
        dot = graphviz.Digraph(name="forests")
        self._configure_graph_style(dot)
        if title:
            dot.attr(label=title, labelloc="t")

        count = 0
        for idx, forest in enumerate(forests):
            fill = "#ffffcc" if highlight is not None and forest == highlight else "#ffffff"
            self._render_forest(dot, forest, f"f{idx}", fill)
            count += 1
        logger.debug(f"ForestRenderer: rendered {count} forests")
        return dot

    def _configure_graph_style(self, dot: graphviz.Digraph, rankdir: str = "TB"):
        """
        Configure base graph styling.

        Args:
            dot (graphviz.Digraph): Graph to configure
            rankdir (str): Layout direction ('TB', 'LR', etc.)
        """
        dot.attr(rankdir=rankdir, bgcolor="transparent")
        dot.attr("node", shape="circle", style="filled", fontname="Arial", fontsize="10")
        dot.attr("edge", color="#555555", arrowhead="none")

    def _render_forest(self, dot: graphviz.Digraph, forest: MarkedForest, prefix: str, fill: str):
        """
        Add one forest as a cluster.

        Args:
            dot (graphviz.Digraph): Graph to add to
            forest (MarkedForest): Forest to draw
            prefix (str): Unique node-id prefix for this forest
            fill (str): Node fill color
        """
        with dot.subgraph(name=f"cluster_{prefix}") as sub:
            sub.attr(label=f"rank {forest.rank}: {format_forest(forest)}", style="rounded", color="#999999")
            ranks: List[List[str]] = [[] for _ in range(forest.rank + 2)]
            for r, root in enumerate(forest.roots):
                self._render_node(sub, root, f"{prefix}_{r}", 0, ranks, fill)
            for ids in ranks:
                with sub.subgraph() as same:
                    same.attr(rank="same")
                    for node_id in ids:
                        same.node(node_id)

    def _render_node(self, dot: graphviz.Digraph, node: ForestNode, node_id: str, depth: int,
                     ranks: List[List[str]], fill: str):
        dot.node(node_id, str(node.label), fillcolor=fill)
        ranks[depth].append(node_id)
        for c, child in enumerate(node.children):
            child_id = f"{node_id}_{c}"
            self._render_node(dot, child, child_id, depth + 1, ranks, fill)
            dot.edge(node_id, child_id)
