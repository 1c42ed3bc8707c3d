"""Symplectic maps in (a, a^dag) ordering and witness point-set transformations.

A map Lambda acts on the column vector (a_1..a_m, a_1^dag..a_m^dag) and must
satisfy Lambda^dag diag(1, -1) Lambda = diag(1, -1).  The complex ordering is
used throughout because the witness formulas are stated in it; a (q, p)
conversion helper exists for debugging only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

VALIDATION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """2m x 2m complex matrix with the block-conjugate structure [[E, F], [F*, E*]]."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError("need a square matrix of even dimension")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def num_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.num_modes
        return self.matrix[:m, :m], self.matrix[:m, m:]

    def validate(self, tol: float = VALIDATION_TOL) -> tuple[bool, float]:
        """Check Lambda^dag K Lambda = K and the block-conjugate structure."""
        m = self.num_modes
        k = np.diag(np.concatenate([np.ones(m), -np.ones(m)]))
        resid = np.abs(self.matrix.conj().T @ k @ self.matrix - k).max()
        e, f = self.blocks
        struct = max(np.abs(self.matrix[m:, :m] - f.conj()).max(),
                     np.abs(self.matrix[m:, m:] - e.conj()).max())
        resid = float(max(resid, struct))
        return resid < tol, resid

    def inverse(self) -> "SymplecticMap":
        """Symplectic inverse K Lambda^dag K (exact, no numeric inversion)."""
        m = self.num_modes
        k = np.diag(np.concatenate([np.ones(m), -np.ones(m)]))
        return SymplecticMap(k @ self.matrix.conj().T @ k)

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.matrix @ other.matrix)

    def apply(self, xi) -> np.ndarray:
        """Map a length-m complex vector xi through (xi, xi^*) -> Lambda (xi, xi^*)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        m = self.num_modes
        out = self.matrix @ np.concatenate([xi, xi.conj()])
        top, bottom = out[:m], out[m:]
        if np.abs(bottom - top.conj()).max() > 1e-9:
            raise ValueError("map output is not of (xi, xi^*) form; map invalid")
        return top

    def to_quadrature(self) -> np.ndarray:
        """Equivalent real map in (q, p) ordering; debugging aid only."""
        m = self.num_modes
        w = np.block([[np.eye(m), 1j * np.eye(m)], [np.eye(m), -1j * np.eye(m)]]) / np.sqrt(2)
        s = w.conj().T @ self.matrix @ w
        return np.real(s)


def identity_map(m: int) -> SymplecticMap:
    return SymplecticMap(np.eye(2 * m, dtype=complex))


def phase_map(phis) -> SymplecticMap:
    """a_k -> e^{i phi_k} a_k."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    return SymplecticMap(np.diag(np.concatenate([np.exp(1j * phis), np.exp(-1j * phis)])))


def squeeze_map(r: float) -> SymplecticMap:
    """Single-mode map a -> cosh(r) a + sinh(r) a^dag.

    Scales points as Re -> e^r Re, Im -> e^-r Im; realized on states by
    fock.squeeze(-r).
    """
    c, s = np.cosh(r), np.sinh(r)
    return SymplecticMap(np.array([[c, s], [s, c]], dtype=complex))


def displacement_frame_map(m: int) -> SymplecticMap:
    return identity_map(m)


def beamsplitter_map(theta: float) -> SymplecticMap:
    """Two-mode map of fock.beamsplitter: a1 -> cos a1 - sin a2, a2 -> cos a2 + sin a1."""
    c, s = np.cos(theta), np.sin(theta)
    e = np.array([[c, -s], [s, c]])
    z = np.zeros((2, 2))
    return SymplecticMap(np.block([[e, z], [z, e]]).astype(complex))


def collective_map(m_half: int, lam_b: SymplecticMap | None = None) -> SymplecticMap:
    """Map sending a_A, a_B to the collective modes (a_A +- Lambda a_B)/sqrt(2).

    The first m_half output modes carry the + combination, the last m_half the
    - combination.  `lam_b` is the pairing map on the B modes (identity when
    omitted).
    """
    lam_b = lam_b if lam_b is not None else identity_map(m_half)
    e, f = lam_b.blocks
    i = np.eye(m_half)
    z = np.zeros((m_half, m_half))
    top = np.block([[i, e, z, f], [i, -e, z, -f]]) / np.sqrt(2)
    bottom = np.block([[z, f.conj(), i, e.conj()], [z, -f.conj(), i, -e.conj()]]) / np.sqrt(2)
    return SymplecticMap(np.vstack([top, bottom]))


def pair_points(xi_a_list, lam: SymplecticMap) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pair each xi^A with the xi^B satisfying (xi^A, xi^A*) = Lambda (xi^B, xi^B*)."""
    ok, resid = lam.validate()
    if not ok:
        raise ValueError(f"pairing map is not symplectic (residual {resid:.2e})")
    inv = lam.inverse()
    pairs = []
    for xi_a in xi_a_list:
        xi_a = np.atleast_1d(np.asarray(xi_a, dtype=complex))
        pairs.append((xi_a, inv.apply(xi_a)))
    return pairs


@dataclass(frozen=True, eq=False)
class GaussianFrame:
    """Local Gaussian transformation data: per-party maps plus collective-mode maps.

    Describes rho -> U_+ U_- U_A U_B rho (...)^dag where U_A, U_B act on the
    parties, U_+ (U_-) on the +(-) collective modes, each realizing the stored
    symplectic map with the stored displacement.
    """

    lam_a: SymplecticMap
    lam_b: SymplecticMap
    lam_plus: SymplecticMap
    alpha0_a: np.ndarray = field(default=None)
    alpha0_b: np.ndarray = field(default=None)
    alpha0_plus: np.ndarray = field(default=None)

    def __post_init__(self):
        m = self.lam_a.num_modes
        if self.lam_b.num_modes != m or self.lam_plus.num_modes != m:
            raise ValueError("frame maps must share the mode count")
        for name in ("alpha0_a", "alpha0_b", "alpha0_plus"):
            v = getattr(self, name)
            v = np.zeros(m, dtype=complex) if v is None else \
                np.atleast_1d(np.asarray(v, dtype=complex))
            if v.shape != (m,):
                raise ValueError(f"{name} must have one entry per party mode")
            v.setflags(write=False)
            object.__setattr__(self, name, v)


def wedge(x, y) -> complex:
    """Antisymmetric phase-space product sum_m (y_m x_m^* - y_m^* x_m)."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    return complex(np.sum(y * x.conj() - y.conj() * x))


def transform_point_set(pairs, frame: GaussianFrame):
    """Transform witness points into the frame of the transformed state.

    Returns (new_pairs, phase_matrix) where phase[j, k] multiplies the witness
    matrix of the transformed state entrywise to recover the original one:
    phase = exp[wedge(dxi~^A, alpha~^A) + wedge(dxi~^B, alpha~^B)] with
    alpha~^mu = Lambda_+ alpha0^mu + alpha0^+ / sqrt(2).  The 1/sqrt(2)
    reflects that a collective-mode displacement splits evenly between the
    parties.  The phases have unit modulus and cancel in the spectrum, so both
    matrices share their minimum eigenvalue.
    """
    m = frame.lam_a.num_modes
    new_pairs = []
    for xi_a, xi_b in pairs:
        xi_a = np.atleast_1d(np.asarray(xi_a, dtype=complex))
        xi_b = np.atleast_1d(np.asarray(xi_b, dtype=complex))
        if xi_a.shape != (m,) or xi_b.shape != (m,):
            raise ValueError("point dimensions do not match the frame")
        new_a = (frame.lam_plus @ frame.lam_a).apply(xi_a)
        new_b = (frame.lam_plus @ frame.lam_b).apply(xi_b)
        new_pairs.append((new_a, new_b))

    alpha_a = frame.lam_plus.apply(frame.alpha0_a) + frame.alpha0_plus / np.sqrt(2)
    alpha_b = frame.lam_plus.apply(frame.alpha0_b) + frame.alpha0_plus / np.sqrt(2)

    n = len(new_pairs)
    phases = np.ones((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            da = new_pairs[j][0] - new_pairs[k][0]
            db = new_pairs[j][1] - new_pairs[k][1]
            phases[j, k] = np.exp(wedge(da, alpha_a) + wedge(db, alpha_b))
    return new_pairs, phases


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def map_to_json(lam: SymplecticMap) -> dict:
    """Row-major [re, im] pairs."""
    return {
        "modes": lam.num_modes,
        "matrix": [[float(z.real), float(z.imag)] for z in lam.matrix.reshape(-1)],
    }


def map_from_json(obj: dict) -> SymplecticMap:
    m = int(obj["modes"])
    flat = np.array([complex(re, im) for re, im in obj["matrix"]])
    return SymplecticMap(flat.reshape(2 * m, 2 * m))


def points_to_json(pairs, lam: SymplecticMap) -> str:
    records = []
    for xi_a, xi_b in pairs:
        xi_a = np.atleast_1d(np.asarray(xi_a, complex))
        xi_b = np.atleast_1d(np.asarray(xi_b, complex))
        records.append([
            {"re_A": float(a.real), "im_A": float(a.imag),
             "re_B": float(b.real), "im_B": float(b.imag)}
            for a, b in zip(xi_a, xi_b)
        ])
    return json.dumps({"n": len(records), "lambda": map_to_json(lam),
                       "points": records}, sort_keys=True)


def points_from_json(text: str):
    obj = json.loads(text)
    lam = map_from_json(obj["lambda"])
    pairs = []
    for rec in obj["points"]:
        xi_a = np.array([complex(e["re_A"], e["im_A"]) for e in rec])
        xi_b = np.array([complex(e["re_B"], e["im_B"]) for e in rec])
        pairs.append((xi_a, xi_b))
    return pairs, lam
