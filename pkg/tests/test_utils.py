#!/usr/bin/env python
"""
Implement common functions for tests
"""
from typing import Dict, Tuple
import io
import itertools
import sys

from kplume.kinetics import KineticsParams, transition_matrix


def parse_yaml(yaml_file):
    """
    Parses a yaml file, returning its contents as a dict.
    """

    try:
        import yaml
    except ImportError:
        sys.exit("Unable to import yaml module.")

    try:
        with io.open(yaml_file, encoding="utf-8") as fname:
            return yaml.safe_load(fname)
    except IOError:
        sys.exit("Unable to open YAML file: {0}".format(yaml_file))


def path_weights(params: KineticsParams, n: int) -> Dict[Tuple[int, ...], float]:
    """Probability of every free(1)/adsorbed(0) state path of length n."""
    pi_f, pi_a = params.initial
    matrix = transition_matrix(params)
    # matrix rows are (free, adsorbed)
    row = {1: 0, 0: 1}
    weights = {}
    for path in itertools.product((0, 1), repeat=n):
        weight = pi_f if path[0] == 1 else pi_a
        for prev, nxt in zip(path, path[1:]):
            weight *= matrix[row[prev], row[nxt]]
        if weight > 0.0:
            weights[path] = weight
    return weights


def brute_force_pmf(params: KineticsParams, steps, n: int) -> Dict[Tuple[int, int], float]:
    """
    Law of S(n) by enumerating every state path and every sequence of free steps.

    steps is an iterable of (dx, dy, p) for one free step, advection included.
    """
    steps = list(steps)
    pmf: Dict[Tuple[int, int], float] = {}
    for path, weight in path_weights(params, n).items():
        k = sum(path)
        for seq in itertools.product(steps, repeat=k):
            x = sum(s[0] for s in seq)
            y = sum(s[1] for s in seq)
            p = weight
            for s in seq:
                p *= s[2]
            pmf[(x, y)] = pmf.get((x, y), 0.0) + p
    return pmf


def brute_force_condvar(pmf: Dict[Tuple[int, int], float], x: int) -> float:
    col = {y: p for (px, y), p in pmf.items() if px == x}
    mass = sum(col.values())
    mean = sum(y * p for y, p in col.items()) / mass
    return sum((y - mean) ** 2 * p for y, p in col.items()) / mass
