# Apache License, Version 2.0, refer to LICENSE.txt

import json

from ._mmnl import (
    mnl_prob,
    reference_point,
    simulate_csv,
    true_choice_prob,
    truncation_error_bound,
)
from ._mmnl import fit_csv as _fit_csv

__all__ = [
    "fit",
    "mnl_prob",
    "reference_point",
    "simulate",
    "true_choice_prob",
    "truncation_error_bound",
]


def simulate(design="nonpanel", n=500, T=10, seed=1):
    """Simulated dataset as CSV text (same format as `mmnl simulate`)."""
    return simulate_csv(design, n, T, seed)


def fit(data_csv, config=None, model=None):
    """Run a sampler on CSV text and return the summary as a dict.

    `config` takes the same keys as the JSON configuration file.
    """
    text = json.dumps(config) if config else ""
    return json.loads(_fit_csv(data_csv, text, model))
