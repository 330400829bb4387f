"""Python face of the measured-group toolkit.

The compiled core speaks JSON text; this wrapper turns dicts into text and
back so callers never touch serialization.
"""

import json as _json

import _mgtkit

__version__ = _mgtkit.__version__

normalize_word = _mgtkit.normalize_word
ball_words = _mgtkit.ball_words
shannon_entropy = _mgtkit.shannon_entropy


def run_experiment(config):
    """Run one experiment; `config` is a dict (see the CLI docs for kinds)."""
    return _json.loads(_mgtkit.run_experiment(_json.dumps(config)))


def acceptance_report(filter="", mutate=False):
    """Run the acceptance criteria whose names contain `filter`."""
    return _json.loads(_mgtkit.acceptance_report(filter, mutate))


def validate_groupoid(groupoid):
    """Validate a finite measured groupoid given as a dict."""
    return _json.loads(_mgtkit.validate_groupoid(_json.dumps(groupoid)))


def solve_cocycle(cocycle, cap=1_000_000):
    """Search for a homomorphism cohomologous to the given action cocycle."""
    return _json.loads(_mgtkit.solve_cocycle(_json.dumps(cocycle), cap))
