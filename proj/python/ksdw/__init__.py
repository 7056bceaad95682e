"""Keyword search over a relational warehouse: keywords in, ranked SQL candidates out."""
import json

from ._core import ConfigError, QueryError, format_sql, parse_query, render_query
from ._core import Workspace as _Workspace

__all__ = ["Workspace", "QueryError", "ConfigError", "parse_query", "render_query", "format_sql"]


class Workspace:
    """A loaded workspace (graph, data, indexes) built from a config file."""

    def __init__(self, config):
        self._ws = _Workspace(str(config))

    def search(self, query, page=0):
        """Returns the service's SearchResponse as a dict."""
        return json.loads(self._ws.search_json(query, page))

    def tables(self):
        return json.loads(self._ws.tables_json())

    def evaluate(self, suite=""):
        return json.loads(self._ws.evaluate_json(str(suite)))

    @property
    def warnings(self):
        return list(self._ws.warnings)
