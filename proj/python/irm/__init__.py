"""Interactive regret minimization: sort a few points per round until the best one is found."""

import json

from ._irm import (
    ENGINE_VERSION,
    Dataset,
    HiddenUser,
    IrmError,
    Session,
    dataset_from_json,
    dataset_from_rows,
    generate_dataset,
    load_dataset,
    regret_ratio,
    replay,
    skyline,
)
from ._irm import Service as _Service
from ._irm import _run_experiment

__all__ = [
    "ENGINE_VERSION",
    "Dataset",
    "HiddenUser",
    "IrmError",
    "Service",
    "Session",
    "dataset_from_json",
    "dataset_from_rows",
    "generate_dataset",
    "load_dataset",
    "regret_ratio",
    "replay",
    "run_experiment",
    "simulate",
    "skyline",
]


def run_experiment(dataset, algorithms=("sorting-simplex", "uh-simplex"), s=(4,), epsilon=(0.0,), trials=1, seed=1):
    """One record (dict) per (algorithm, s, epsilon, seed)."""
    return json.loads(_run_experiment(dataset, list(algorithms), list(s), list(epsilon), trials, seed))


def simulate(session, user, dataset):
    """Answer every round with a truthful simulated user; returns the session."""
    while not session.finished:
        shown = session.next_display()
        if session.algorithm.startswith("sorting"):
            session.submit_sort(user.sort(dataset, shown))
        else:
            session.submit_favorite(user.favorite(dataset, shown))
    return session


class Service(_Service):
    """In-process access to the JSON API; handle() returns (status, parsed body)."""

    def handle(self, method, path, body=None):
        status, text = self._handle(method, path, "" if body is None else json.dumps(body))
        return status, json.loads(text)
