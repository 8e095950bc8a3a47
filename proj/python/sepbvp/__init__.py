"""Green's-function solver and hypothesis certifier for second-order problems
u'' + g(t) f(t, u) = 0 with separated boundary conditions."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_config as _run_config


def run(config):
    """Run a config (dict or JSON string). Returns (report dict, exit code)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    report, code = _run_config(text)
    return _json.loads(report), code
