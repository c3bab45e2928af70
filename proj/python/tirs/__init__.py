"""Transit-integrated ride-sharing batch simulator."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, simulate as _simulate


def simulate(config, graph, schedule, requests):
    """Run a simulation. The event log comes back as a list of dicts."""
    out = _simulate(config, graph, schedule, requests)
    out["events"] = [json.loads(line) for line in out["events"].splitlines()]
    return out
