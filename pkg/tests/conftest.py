import math

import numpy as np
import pytest

from susyqm import specfun
from susyqm.susy import (SusyTransform, oscillator_confluent_seeds, oscillator_seed, pt_seed,
                         well_confluent_seeds)
from susyqm.systems import InfiniteWell, Oscillator, PoschlTeller


@pytest.fixture(scope="session")
def osc():
    return Oscillator()


@pytest.fixture(scope="session")
def well():
    return InfiniteWell()


@pytest.fixture(scope="session")
def pt3():
    return PoschlTeller(3.0)


def make_fig1():
    o = Oscillator()
    return SusyTransform(o, [oscillator_seed(-1.5, 0.99)] + oscillator_confluent_seeds(o, 0.51), label="fig1")


def make_fig2():
    w = InfiniteWell()
    return SusyTransform(w, well_confluent_seeds(w, 1, 0.1), label="fig2")


def make_fig3():
    p = PoschlTeller(3.0)
    return SusyTransform(p, [pt_seed(p, 1.5, 1.9)], label="fig3")


@pytest.fixture(scope="session")
def fig1():
    return make_fig1()


@pytest.fixture(scope="session")
def fig2():
    return make_fig2()


@pytest.fixture(scope="session")
def fig3():
    return make_fig3()


@pytest.fixture(scope="session")
def presets(fig1, fig2, fig3):
    return {"fig1": fig1, "fig2": fig2, "fig3": fig3}


# closed forms printed alongside the three figures, used as independent oracles

def printed_w_fig1(x, mu=0.99, w0=0.51):
    x = np.asarray(x, dtype=float)
    E = specfun.erf(x)
    sp = math.sqrt(math.pi)
    inner = (4 * w0 - mu - 2 * mu * x * x
             + (1 + 2 * sp * (mu + 2 * w0) * x * np.exp(x * x) - 2 * x * x) * E)
    return np.exp(-1.5 * x * x) / sp * (
        -2 * x + 4 * math.pi * w0 * mu * x * np.exp(2 * x * x)
        + sp * np.exp(x * x) * inner + 2 * math.pi * x * np.exp(2 * x * x) * E**2)


def printed_v2_fig2(x, m1=1, w0=0.1):
    x = np.asarray(x, dtype=float)
    k = m1 + 1
    s, c = np.sin(k * x), np.cos(k * x)
    shift = math.pi * w0 + x
    return 16 * k * k * s * (s - k * shift * c) / (np.sin(2 * k * x) - 2 * k * shift) ** 2
