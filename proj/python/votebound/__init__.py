"""Margins, margin moments, and C-bound variants for weighted majority votes.

The heavy lifting happens in the compiled extension; this package adds a
couple of thin conveniences on top.
"""

import json as _json

from ._votebound import *  # noqa: F401,F403
from ._votebound import __version__, full_report_json  # noqa: F401


def full_report(dataset, ensemble, omega=2.0, seed=0):
    """Risk, moments, and every applicable bound as a plain dict."""
    return _json.loads(full_report_json(dataset, ensemble, omega=omega, seed=seed))
