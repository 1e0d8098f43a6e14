"""Input checks shared by the estimators and the CLI."""

from .graph import Graph, GraphError, is_connected


def check_graph(G, *, connected=False, min_nodes=1) -> Graph:
    """Return ``G`` if it is a structurally sound :class:`Graph`."""
    if not isinstance(G, Graph):
        raise TypeError(f"expected a Graph, got {type(G).__name__}")
    if G.n_nodes < min_nodes:
        raise GraphError(f"graph needs at least {min_nodes} node(s)")
    G.check()
    if connected and not is_connected(G):
        raise GraphError("graph must be connected")
    return G


def check_probability(x, name, *, open_interval=False, upper=1.0) -> float:
    x = float(x)
    ok = 0.0 < x < upper if open_interval else 0.0 <= x <= upper
    if not ok:
        bounds = f"({0}, {upper})" if open_interval else f"[0, {upper}]"
        raise ValueError(f"{name} must lie in {bounds}, got {x}")
    return x
