"""
Published N=2 reference matrices for the x rotation, two projector products,
the common singular bases and two singular-value factors.

U and V are stored exactly as printed; their column signs and the order of
columns inside degenerate blocks follow the printed convention, not ours.
"""

import numpy as np

N = 2

_R2 = np.sqrt(2.0)
_R3 = np.sqrt(3.0)
_R6 = np.sqrt(6.0)

_U1 = np.array([
    [1, -_R2, 1],
    [_R2, 0, -_R2],
    [1, _R2, 1],
])
_U2 = np.array([
    [-_R2, 2, -_R2],
    [-2, 0, 2],
    [-_R2, -2, -_R2],
])
_U3 = np.zeros((3, 3))

X_ROTATION = np.block([
    [_U1, _U2, _U1],
    [-_U2, _U3, _U2],
    [_U1, -_U2, _U1],
]) / 4

T00 = np.array([
    [3, 0, 0, 0, 2, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [-1, 0, 0, 0, 2, 0, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [2, 0, 0, 0, 4, 0, 0, 0, 2],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [-1, 0, 0, 0, 2, 0, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [3, 0, 0, 0, 2, 0, 0, 0, 3],
]) / 8

T22 = np.array([
    [0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -2, 0, 0, 0, -2, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0],
]) / 8

_a = 1 / _R3
_b = 1 / (2 * _R6)
_c = 1 / _R2
_d = 1 / (2 * _R2)
_e = np.sqrt(1.5) / 2
_f = 1 / _R6

U = np.array([
    [_a, _b, -_c, _d, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0.5, -_c, 0, 0.5, 0],
    [0, -_e, 0, _d, 0, 0, 0, 0, -_c],
    [0, 0, 0, 0, 0.5, 0, -_c, -0.5, 0],
    [_a, -_f, 0, -_c, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0.5, 0, _c, -0.5, 0],
    [0, -_e, 0, _d, 0, 0, 0, 0, _c],
    [0, 0, 0, 0, 0.5, _c, 0, 0.5, 0],
    [_a, _b, _c, _d, 0, 0, 0, 0, 0],
])

V = np.array([
    [_a, _f, -_c, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0.5, -_c, 0, 0.5, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, _c, -_c],
    [0, 0, 0, 0.5, 0, -_c, -0.5, 0, 0],
    [_a, -np.sqrt(2 / 3), 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0.5, 0, _c, -0.5, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, _c, _c],
    [0, 0, 0, 0.5, _c, 0, 0.5, 0, 0],
    [_a, _f, _c, 0, 0, 0, 0, 0, 0],
])

# Nonzero |Lambda| entries as {(row, col): value}.
LAMBDA_00 = {(0, 0): 1.0, (1, 1): 0.5}
LAMBDA_22 = {(3, 7): 0.5}

# Column groups whose printed basis is one choice among many.
U_DEGENERATE_BLOCKS = ((5, 6),)
V_DEGENERATE_BLOCKS = ((4, 5),)


def lambda_dense(entries: dict[tuple[int, int], float]) -> np.ndarray:
    matrix = np.zeros(((N + 1) ** 2, (N + 1) ** 2))
    for (row, col), value in entries.items():
        matrix[row, col] = value
    return matrix
