import numpy as np
import pytest

from waanso.model import Edge, Task, TaskGraph, Workload


def app(n_tasks, edges=(), cycles=100, signal=None, name="app0"):
    """One application with tasks 0..n-1; ``edges`` are (src, dst, bits)."""
    sig = signal or (1.0, 0.0)
    tasks = tuple(Task(i, cycles if np.isscalar(cycles) else cycles[i], tuple(sig)) for i in range(n_tasks))
    return TaskGraph(name, tasks, tuple(Edge(*e) for e in edges))


def workload(*apps):
    return Workload(tuple(apps))


def rand_index(a, b):
    """Fraction of task pairs on which two labelings agree (same vs different)."""
    a, b = np.asarray(a), np.asarray(b)
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    iu = np.triu_indices(len(a), 1)
    return float(np.mean(same_a[iu] == same_b[iu]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
