"""Covariance-matrix model and positivity criteria for bipartite Gaussian states.

A two-mode Gaussian state is fully described (up to first moments, which are
irrelevant for the questions treated here) by a Hermitian 4x4 covariance
matrix in the ordering (a1+, a1, a2+, a2), parametrized by six scalars:
the real occupations n1, n2 and the complex correlations m1, m2 (local
anomalous terms), ms (beamsplitter-type cross term) and mc (two-mode
squeezing cross term).

Three nested positivity conditions are implemented, each both in closed form
(via a 2x2 Schur complement of the shifted matrix) and through a direct
minimum-eigenvalue oracle:

* physicality:        V + E/2 >= 0
* separability:       T V T + E/2 >= 0   (partial phase-space mirror)
* P-representability: V - I/2 >= 0

The closed-form n2 bounds used here are the oracle-consistent ones,

    n2 >= s/d + sqrt( (1 -+ delta/d)^2 / 4 + |m2 - c/d|^2 ),

with delta = |mc|^2 - |ms|^2 signed ("-" for physicality, "+" for
separability), and

    n2 >= 1/2 + s'/d' + |m2 - c'/d'|

for P-representability.  These agree with the eigenvalue oracle to machine
precision; see tests for the cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBoundError,
    InvalidParameterError,
    SingularBlockError,
    StructuralError,
)

# Absolute tolerances; all matrices handled here are 4x4 and O(1).
TOL_PSD = 1e-10
TOL_HERM = 1e-12
TOL_SING = 1e-12

# Canonical constant matrices.
Z = np.diag([1.0, -1.0])
X = np.array([[0.0, 1.0], [1.0, 0.0]])
I2 = np.eye(2)
I4 = np.eye(4)
E = np.block([[Z, np.zeros((2, 2))], [np.zeros((2, 2)), Z]])
T = np.block([[I2, np.zeros((2, 2))], [np.zeros((2, 2)), X]])

METHOD_CLOSED = "closed-form"
METHOD_EIG = "eigen-oracle"


@dataclass(frozen=True)
class GaussianParams:
    """The six scalar parameters of a two-mode covariance matrix.

    No physicality is assumed: unphysical parameter sets are representable
    on purpose, only n1, n2 >= 0 is enforced.
    """

    n1: float
    n2: float
    m1: complex = 0.0
    m2: complex = 0.0
    ms: complex = 0.0
    mc: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n1", float(self.n1))
        object.__setattr__(self, "n2", float(self.n2))
        for name in ("m1", "m2", "ms", "mc"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.n1 < 0.0 or self.n2 < 0.0:
            raise InvalidParameterError(
                f"occupations must be nonnegative, got n1={self.n1}, n2={self.n2}"
            )

    def mirror(self) -> "GaussianParams":
        """Parameter-level partial transpose: swap ms <-> mc, conjugate m2."""
        return GaussianParams(
            n1=self.n1,
            n2=self.n2,
            m1=self.m1,
            m2=self.m2.conjugate(),
            ms=self.mc,
            mc=self.ms,
        )


@dataclass(frozen=True)
class ClosedFormIntermediates:
    """Scalar intermediates of the closed-form bounds.

    (s, c, d) belong to the physicality/separability family, (s_p, c_p, d_p)
    to the P-representability family.
    """

    s: float
    c: complex
    d: float
    s_p: float
    c_p: complex
    d_p: float


@dataclass(frozen=True)
class Verdict:
    """Classification record for one state.

    ``separable`` and ``p_representable`` are None (not applicable) whenever
    the state is unphysical: unphysical operators are outside both sets.
    Margins are signed distances to the respective decision boundaries
    (minimum eigenvalue of the shifted matrix for the eigen-oracle, the
    smaller of the mode-1 margin and n2 minus the n2 bound for the closed
    form); NaN when not applicable.
    """

    physical: bool
    separable: bool | None
    p_representable: bool | None
    margin_physical: float
    margin_separable: float
    margin_prep: float
    method: str
    fallbacks: tuple[str, ...] = ()


def intermediates(p: GaussianParams) -> ClosedFormIntermediates:
    """Compute (s, c, d) and the primed P-representability family."""
    n1, m1, ms, mc = p.n1, p.m1, p.ms, p.mc
    # Groupings below are chosen so that swapping ms <-> mc yields the exact
    # complex conjugate bit for bit (the mirror identity is tested exactly).
    s = n1 * (abs(mc) ** 2 + abs(ms) ** 2) - (2.0 * (mc * ms * m1.conjugate()).real)
    c = (2.0 * n1) * (ms.conjugate() * mc) - (
        mc**2 * m1.conjugate() + ms.conjugate() ** 2 * m1
    )
    d = n1**2 - 0.25 - abs(m1) ** 2
    h = n1 - 0.5
    s_p = h * (abs(mc) ** 2 + abs(ms) ** 2) - (2.0 * (mc * ms * m1.conjugate()).real)
    c_p = (2.0 * h) * (ms.conjugate() * mc) - (
        mc**2 * m1.conjugate() + ms.conjugate() ** 2 * m1
    )
    d_p = h**2 - abs(m1) ** 2
    return ClosedFormIntermediates(s=s, c=c, d=d, s_p=s_p, c_p=c_p, d_p=d_p)


def build_covariance(p: GaussianParams) -> np.ndarray:
    """Assemble the 4x4 covariance matrix in the (a1+, a1, a2+, a2) ordering."""
    n1, n2, m1, m2, ms, mc = p.n1, p.n2, p.m1, p.m2, p.ms, p.mc
    return np.array(
        [
            [n1, m1, ms, mc],
            [m1.conjugate(), n1, mc.conjugate(), ms.conjugate()],
            [ms.conjugate(), mc, n2, m2],
            [mc.conjugate(), ms, m2.conjugate(), n2],
        ],
        dtype=complex,
    )


def _require_hermitian(M: np.ndarray, tol: float = TOL_HERM) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {M.shape}")
    dev = np.abs(M - M.conj().T).max()
    if dev > tol:
        raise StructuralError(f"matrix is not Hermitian: max deviation {dev:.3e}")
    return M


def params_from_covariance(V: np.ndarray, tol: float = 1e-9) -> GaussianParams:
    """Read the six parameters off a structured 4x4 covariance matrix.

    Rejects matrices that are not Hermitian or do not carry the required
    conjugation pattern between the two rows of each mode.
    """
    V = _require_hermitian(V, tol)
    if V.shape != (4, 4):
        raise StructuralError(f"expected a 4x4 matrix, got shape {V.shape}")
    checks = [
        abs(V[0, 0] - V[1, 1]),
        abs(V[2, 2] - V[3, 3]),
        abs(V[0, 0].imag),
        abs(V[2, 2].imag),
        abs(V[0, 2] - V[1, 3].conjugate()),
        abs(V[0, 3] - V[1, 2].conjugate()),
    ]
    if max(checks) > tol:
        raise StructuralError(
            "matrix does not have the two-mode covariance pattern "
            f"(max deviation {max(checks):.3e})"
        )
    return GaussianParams(
        n1=V[0, 0].real,
        n2=V[2, 2].real,
        m1=V[0, 1],
        m2=V[2, 3],
        ms=V[0, 2],
        mc=V[0, 3],
    )


def decompose_blocks(V: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split V into the local blocks V1, V2 and the cross-correlation block C."""
    V = _require_hermitian(V)
    return V[:2, :2].copy(), V[2:, 2:].copy(), V[:2, 2:].copy()


def min_eigenvalue_hermitian(M: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix (oracle backend)."""
    M = _require_hermitian(M)
    return float(np.linalg.eigvalsh(M)[0])


def schur_complement(
    V1: np.ndarray,
    V2: np.ndarray,
    C: np.ndarray,
    shift1: np.ndarray,
    shift2: np.ndarray,
) -> np.ndarray:
    """(V2 + shift2) - C+ (V1 + shift1)^-1 C, for the block positivity test."""
    A = np.asarray(V1, dtype=complex) + np.asarray(shift1, dtype=complex)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) <= TOL_SING:
        raise SingularBlockError(f"upper-left block is singular (|det| = {abs(det):.3e})")
    Ainv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=complex) / det
    C = np.asarray(C, dtype=complex)
    return np.asarray(V2, dtype=complex) + np.asarray(shift2, dtype=complex) - C.conj().T @ Ainv @ C


def partial_transpose(V: np.ndarray) -> np.ndarray:
    """Partial phase-space mirror on mode 2: V -> T V T."""
    V = _require_hermitian(V)
    return T @ V @ T


# ---------------------------------------------------------------------------
# Closed-form n2 bounds


def physicality_bound_n2(p: GaussianParams) -> float:
    """Smallest n2 compatible with V + E/2 >= 0, at fixed remaining parameters.

    Requires d = n1^2 - 1/4 - |m1|^2 > 0; degenerate or negative d raises
    DegenerateBoundError (negative d means the mode-1 condition already
    fails, so no n2 bound exists).
    """
    im = intermediates(p)
    if im.d <= TOL_SING:
        raise DegenerateBoundError(f"physicality bound degenerate: d = {im.d:.3e}")
    delta = abs(p.mc) ** 2 - abs(p.ms) ** 2
    return im.s / im.d + math.sqrt(
        0.25 * (1.0 - delta / im.d) ** 2 + abs(p.m2 - im.c / im.d) ** 2
    )


def separability_bound_n2(p: GaussianParams) -> float:
    """Smallest n2 with T V T + E/2 >= 0; differs from the physicality bound
    only by the sign in front of delta/d."""
    im = intermediates(p)
    if im.d <= TOL_SING:
        raise DegenerateBoundError(f"separability bound degenerate: d = {im.d:.3e}")
    delta = abs(p.mc) ** 2 - abs(p.ms) ** 2
    return im.s / im.d + math.sqrt(
        0.25 * (1.0 + delta / im.d) ** 2 + abs(p.m2 - im.c / im.d) ** 2
    )


def prep_bound_n2(p: GaussianParams) -> float:
    """Smallest n2 with V - I/2 >= 0, at fixed remaining parameters."""
    im = intermediates(p)
    if im.d_p <= TOL_SING:
        raise DegenerateBoundError(f"P-representability bound degenerate: d' = {im.d_p:.3e}")
    return 0.5 + im.s_p / im.d_p + abs(p.m2 - im.c_p / im.d_p)


def _mode1_margin_physical(p: GaussianParams) -> float:
    return p.n1 - math.sqrt(abs(p.m1) ** 2 + 0.25)


def _mode1_margin_prep(p: GaussianParams) -> float:
    return p.n1 - abs(p.m1) - 0.5


# ---------------------------------------------------------------------------
# Criterion evaluations


def _physical_margin_closed(p: GaussianParams) -> float:
    """Closed-form physicality margin; DegenerateBoundError near d = 0."""
    im = intermediates(p)
    if abs(im.d) <= TOL_SING:
        raise DegenerateBoundError(f"degenerate physicality bound: d = {im.d:.3e}")
    m1_margin = _mode1_margin_physical(p)
    if im.d < 0.0:
        # Mode-1 uncertainty already violated; no n2 bound exists.
        return m1_margin
    return min(m1_margin, p.n2 - physicality_bound_n2(p))


def _separable_margin_closed(p: GaussianParams) -> float:
    im = intermediates(p)
    if abs(im.d) <= TOL_SING:
        raise DegenerateBoundError(f"degenerate separability bound: d = {im.d:.3e}")
    m1_margin = _mode1_margin_physical(p)
    if im.d < 0.0:
        return m1_margin
    return min(m1_margin, p.n2 - separability_bound_n2(p))


def _prep_margin_closed(p: GaussianParams) -> float:
    im = intermediates(p)
    if abs(im.d_p) <= TOL_SING:
        raise DegenerateBoundError(f"degenerate P-representability bound: d' = {im.d_p:.3e}")
    m1_margin = _mode1_margin_prep(p)
    if im.d_p < 0.0:
        # (n1 - 1/2)^2 < |m1|^2 forces the mode-1 condition to fail.
        return m1_margin
    return min(m1_margin, p.n2 - prep_bound_n2(p))


def _physical_margin_eig(V: np.ndarray) -> float:
    return min(
        min_eigenvalue_hermitian(V + E / 2),
        min_eigenvalue_hermitian(V),
    )


def _separable_margin_eig(V: np.ndarray) -> float:
    return min_eigenvalue_hermitian(partial_transpose(V) + E / 2)


def _prep_margin_eig(V: np.ndarray) -> float:
    return min_eigenvalue_hermitian(V - I4 / 2)


def physicality_closed_form(p: GaussianParams, tol_psd: float = TOL_PSD) -> Verdict:
    margin = _physical_margin_closed(p)
    return Verdict(
        physical=margin >= -tol_psd,
        separable=None,
        p_representable=None,
        margin_physical=margin,
        margin_separable=math.nan,
        margin_prep=math.nan,
        method=METHOD_CLOSED,
    )


def physicality_eig(V: np.ndarray, tol_psd: float = TOL_PSD) -> Verdict:
    margin = _physical_margin_eig(V)
    return Verdict(
        physical=margin >= -tol_psd,
        separable=None,
        p_representable=None,
        margin_physical=margin,
        margin_separable=math.nan,
        margin_prep=math.nan,
        method=METHOD_EIG,
    )


def separability_closed_form(p: GaussianParams, tol_psd: float = TOL_PSD) -> Verdict:
    margin_phys = _physical_margin_closed(p)
    physical = margin_phys >= -tol_psd
    if not physical:
        return Verdict(
            physical=False,
            separable=None,
            p_representable=None,
            margin_physical=margin_phys,
            margin_separable=math.nan,
            margin_prep=math.nan,
            method=METHOD_CLOSED,
        )
    margin_sep = _separable_margin_closed(p)
    return Verdict(
        physical=True,
        separable=margin_sep >= -tol_psd,
        p_representable=None,
        margin_physical=margin_phys,
        margin_separable=margin_sep,
        margin_prep=math.nan,
        method=METHOD_CLOSED,
    )


def separability_eig(V: np.ndarray, tol_psd: float = TOL_PSD) -> Verdict:
    margin_phys = _physical_margin_eig(V)
    physical = margin_phys >= -tol_psd
    if not physical:
        return Verdict(
            physical=False,
            separable=None,
            p_representable=None,
            margin_physical=margin_phys,
            margin_separable=math.nan,
            margin_prep=math.nan,
            method=METHOD_EIG,
        )
    margin_sep = _separable_margin_eig(V)
    return Verdict(
        physical=True,
        separable=margin_sep >= -tol_psd,
        p_representable=None,
        margin_physical=margin_phys,
        margin_separable=margin_sep,
        margin_prep=math.nan,
        method=METHOD_EIG,
    )


def p_representability_closed_form(p: GaussianParams, tol_psd: float = TOL_PSD) -> Verdict:
    margin_prep = _prep_margin_closed(p)
    return Verdict(
        physical=True,
        separable=None,
        p_representable=margin_prep >= -tol_psd,
        margin_physical=math.nan,
        margin_separable=math.nan,
        margin_prep=margin_prep,
        method=METHOD_CLOSED,
    )


def p_representability_eig(V: np.ndarray, tol_psd: float = TOL_PSD) -> Verdict:
    margin_prep = _prep_margin_eig(V)
    return Verdict(
        physical=True,
        separable=None,
        p_representable=margin_prep >= -tol_psd,
        margin_physical=math.nan,
        margin_separable=math.nan,
        margin_prep=margin_prep,
        method=METHOD_EIG,
    )


def classify(p: GaussianParams, method: str = METHOD_CLOSED, tol_psd: float = TOL_PSD) -> Verdict:
    """Full classification: physicality, then separability and P-representability.

    ``method`` is "closed-form" or "eigen-oracle".  The closed-form route
    falls back to the eigen-oracle per criterion when its bound is
    degenerate; any fallback is recorded in ``fallbacks`` and flips
    ``method`` to "eigen-oracle".
    """
    if method not in (METHOD_CLOSED, METHOD_EIG):
        raise ValueError(f"unknown method {method!r}")

    V = build_covariance(p)
    fallbacks: list[str] = []

    def margin_of(name: str, closed, eig) -> float:
        if method == METHOD_EIG:
            return eig(V)
        try:
            return closed(p)
        except DegenerateBoundError:
            fallbacks.append(name)
            return eig(V)

    margin_phys = margin_of("physical", _physical_margin_closed, _physical_margin_eig)
    physical = margin_phys >= -tol_psd
    if not physical:
        return Verdict(
            physical=False,
            separable=None,
            p_representable=None,
            margin_physical=margin_phys,
            margin_separable=math.nan,
            margin_prep=math.nan,
            method=METHOD_EIG if (method == METHOD_EIG or fallbacks) else METHOD_CLOSED,
            fallbacks=tuple(fallbacks),
        )

    margin_sep = margin_of("separable", _separable_margin_closed, _separable_margin_eig)
    margin_prep = margin_of("p_representable", _prep_margin_closed, _prep_margin_eig)
    return Verdict(
        physical=True,
        separable=margin_sep >= -tol_psd,
        p_representable=margin_prep >= -tol_psd,
        margin_physical=margin_phys,
        margin_separable=margin_sep,
        margin_prep=margin_prep,
        method=METHOD_EIG if (method == METHOD_EIG or fallbacks) else METHOD_CLOSED,
        fallbacks=tuple(fallbacks),
    )
