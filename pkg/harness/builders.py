"""Networks and datasets of the built-in experiments."""
from typing import Optional, Tuple

import numpy as np

from network.mlp import ActivationKind, Dataset, Mlp

BUMP_TRACKED = ("w1_1_1", "w2_1_1")
BUMP_OPTIMUM = (10.0, 1.0)
BUMP_LOCAL_EXTREMUM = (0.7003, 35.2626)

EX5_TRACKED = ("w1_1_1", "w1_11_1")
EX5_RELATIVE_OPTIMUM = (19.3065, -20.4575)

# Hidden-layer vectors of the 1-15-1 filter network; slots 0 and 10 are the
# tracked weights and get overwritten by the run's initial condition.
EX5_W1 = (
    19.3065, 20.8597, 21.2543, -21.0232, -21.3975, 21.0826, -21.0743, 21.0052,
    21.0272, 20.9446, -20.4575, -21.1307, 21.2419, 20.9357, 21.0157,
)
EX5_B1 = (
    -21.0070, -18.1627, -14.6449, 11.9684, 8.0087, -5.7329, 2.0816, 0.7399,
    2.7071, 6.1967, -8.9802, -11.7774, 14.6532, 18.0707, 20.9846,
)
EX5_W2 = (
    -0.7629, -0.7168, 1.1592, 0.4330, 0.9470, 0.5903, -1.1983, -0.7002,
    -0.3756, -1.0144, -0.2451, -1.3834, 0.4546, 0.2460, 0.3230,
)
EX5_B2 = -0.4954

FILTER_OUTPUTS = (
    -0.832, -0.423, -0.024, 0.344, 1.282, 3.456, 4.020, 3.232, 2.102, 1.504,
    0.248, 1.242, 2.344, 3.262, 2.052, 1.684, 1.022, 2.224, 3.022, 1.984,
)


def build_bump_network(optimal: bool = True, tracked: Optional[Tuple[float, float]] = None) -> Mlp:
    """
    1-2-1 log-sigmoid network.

    Args:
        optimal: install the optimum for every parameter
        tracked: (w1_1_1, w2_1_1) when optimal is False; zeros when omitted
    """
    mlp = Mlp.from_arrays(
        weights=[[[10.0], [10.0]], [[1.0, 1.0]]],
        biases=[[-5.0, 5.0], [-1.0]],
        activations=[ActivationKind.LOG_SIGMOID, ActivationKind.LOG_SIGMOID],
    )
    if optimal:
        return mlp
    a, b = tracked if tracked is not None else (0.0, 0.0)
    return mlp.with_parameters(dict(zip(BUMP_TRACKED, (a, b))))


def build_bump_dataset() -> Dataset:
    """41 samples p = -2.0, -1.9, ..., 2.0 labelled by the optimal network."""
    inputs = np.arange(-20, 21, dtype=float) / 10.0
    return Dataset.generated_by(build_bump_network(optimal=True), inputs)


def build_ex5_network(tracked: Tuple[float, float] = EX5_RELATIVE_OPTIMUM) -> Mlp:
    """1-15-1 network, tan-sigmoid hidden layer and linear output."""
    mlp = Mlp.from_arrays(
        weights=[np.array(EX5_W1).reshape(15, 1), np.array(EX5_W2).reshape(1, 15)],
        biases=[np.array(EX5_B1), np.array([EX5_B2])],
        activations=[ActivationKind.TAN_SIGMOID, ActivationKind.LINEAR],
    )
    return mlp.with_parameters(dict(zip(EX5_TRACKED, tracked)))


def filter_dataset() -> Dataset:
    """The 20 input/output pairs of the nonlinear filter, inputs -1.0 ... 0.9."""
    inputs = np.arange(-10, 10, dtype=float) / 10.0
    return Dataset.from_pairs(zip(inputs, FILTER_OUTPUTS))


DATASETS = {
    "bump": build_bump_dataset,
    "filter": filter_dataset,
}
