"""Object-connector-property data graphs built from relational, XML and RDF
sources, with keyword search over them."""

from ._core import (
    Error,
    Graph,
    build_rdb,
    build_rdf,
    build_xml,
)

__all__ = ["Error", "Graph", "build_rdb", "build_rdf", "build_xml"]
