"""Human-readable tables for the JSON reports, rendered from Jinja2 templates."""

from pathlib import Path
from typing import Any, Dict, Optional

import jinja2

from . import logger

TEMPLATES_DIR = Path(__file__).resolve().parent.parent.parent / "templates"


def _betti_rows(betti: Dict[str, int]):
    return sorted(((int(i), b) for i, b in betti.items()), key=lambda row: row[0])


class ReportRenderer:
    """Maps a report kind to ``<kind>.txt.j2`` and renders the report dict through it."""

    def __init__(self, templates_dir: Optional[Path] = None):
        self.templates_dir = Path(templates_dir or TEMPLATES_DIR)
        self.env = jinja2.Environment(
            loader=jinja2.FileSystemLoader(self.templates_dir),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            undefined=jinja2.StrictUndefined,
        )
        self.env.filters["betti_rows"] = _betti_rows

    def render(self, kind: str, report: Dict[str, Any]) -> str:
        template_path = f"{kind}.txt.j2"
        try:
            template = self.env.get_template(template_path)
        except jinja2.TemplateNotFound:
            logger.error(f"Template not found: {template_path}")
            raise
        return template.render(r=report)
