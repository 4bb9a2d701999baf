import functools

import numpy as np

# independent reference matrices, built directly with np.kron
_REF = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@functools.lru_cache(maxsize=None)
def ref_pauli(label):
    return np.kron(np.kron(_REF[label[0]], _REF[label[1]]), _REF[label[2]])


def ref_matrix(poly):
    return sum((v * ref_pauli(k) for k, v in poly.items()), np.zeros((8, 8), dtype=complex))


def ref_qubit(theta, phi):
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def ref_product_ket(theta, phi):
    k = ref_qubit(theta[0], phi[0])
    for t, p in zip(theta[1:], phi[1:]):
        k = np.kron(k, ref_qubit(t, p))
    return k


def ref_expectation(poly, theta, phi):
    k = ref_product_ket(theta, phi)
    return float(np.real(np.vdot(k, ref_matrix(poly) @ k)))


# PASS/FAIL lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
