# Render package: Jinja2 tables and Graphviz pictures of marked forests

from ..logging_config import get_logger

logger = get_logger("render")
