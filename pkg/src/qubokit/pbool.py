"""Pseudo-Boolean polynomial algebra with QUBO and Ising normal forms.

Binary variables take values in {0, 1}; spin variables in {-1, +1}.  The two
pictures are linked by x = (1 - z) / 2, so x=0 corresponds to spin +1 (qubit
|0>) and x=1 to spin -1 (qubit |1>).  All model types are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleConstraintError

# Terms with |coefficient| below this are dropped during simplification.
COEFF_PRUNE = 1e-12

Key = tuple[int, ...]

VAR_DECISION = "decision"
VAR_AUX_PRODUCT = "aux_product"
VAR_SLACK = "slack"


class VarRegistry:
    """Name <-> index bookkeeping for binary variables.

    Indices are assigned contiguously from 0 in registration order; each
    variable carries a kind tag (decision, aux_product, slack) so decoded
    bitstrings can be split back into their roles.
    """

    def __init__(self) -> None:
        self._names: list[str] = []
        self._kinds: list[str] = []
        self._index: dict[str, int] = {}

    def add(self, name: str, kind: str = VAR_DECISION) -> int:
        if name in self._index:
            raise ValueError(f"variable name {name!r} already registered")
        if kind not in (VAR_DECISION, VAR_AUX_PRODUCT, VAR_SLACK):
            raise ValueError(f"unknown variable kind {kind!r}")
        idx = len(self._names)
        self._names.append(name)
        self._kinds.append(kind)
        self._index[name] = idx
        return idx

    def index_of(self, name: str) -> int:
        return self._index[name]

    def name_of(self, idx: int) -> str:
        return self._names[idx]

    def kind_of(self, idx: int) -> str:
        return self._kinds[idx]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._index


@dataclass(frozen=True)
class LinearExpr:
    """Affine expression over binary variables: sum_i coeffs[i]*x_i + constant."""

    coeffs: dict[int, float]
    constant: float = 0.0

    def value(self, bits) -> float:
        return self.constant + sum(a * bits[i] for i, a in self.coeffs.items())

    def is_zero(self) -> bool:
        return self.constant == 0.0 and all(a == 0.0 for a in self.coeffs.values())


def _norm_key(ids) -> Key:
    # x_i^2 = x_i: duplicate indices collapse.
    return tuple(sorted(set(ids)))


class PseudoBooleanPoly:
    """Multilinear polynomial over binary variables.

    Terms map sorted tuples of distinct variable indices to coefficients;
    the empty tuple holds the constant.  Construction normalizes keys
    (applying x_i^2 = x_i), merges duplicates, and prunes coefficients
    smaller than COEFF_PRUNE in magnitude.
    """

    __slots__ = ("terms", "num_vars")

    def __init__(self, num_vars: int, terms=None) -> None:
        if num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        merged: dict[Key, float] = {}
        for key, coeff in (terms or {}).items():
            k = _norm_key(key)
            if k and k[-1] >= num_vars:
                raise ValueError(f"term {key} references variable >= num_vars={num_vars}")
            if k and k[0] < 0:
                raise ValueError(f"term {key} has a negative variable index")
            merged[k] = merged.get(k, 0.0) + float(coeff)
        self.terms = {k: c for k, c in merged.items() if abs(c) >= COEFF_PRUNE}
        self.num_vars = num_vars

    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def evaluate(self, bits) -> float:
        """Exact evaluation at a {0,1} assignment of length num_vars."""
        if len(bits) != self.num_vars:
            raise ValueError(f"assignment length {len(bits)} != num_vars {self.num_vars}")
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"assignment value {b!r} is not 0/1")
        total = 0.0
        for key, coeff in self.terms.items():
            prod = coeff
            for i in key:
                if not bits[i]:
                    prod = 0.0
                    break
            total += prod
        return total

    def simplify(self) -> "PseudoBooleanPoly":
        """Return the normalized form (idempotent; construction already normalizes)."""
        return PseudoBooleanPoly(self.num_vars, self.terms)

    def plus_terms(self, extra: dict[Key, float], num_vars: int | None = None) -> "PseudoBooleanPoly":
        """New polynomial with extra terms merged in (optionally widening the range)."""
        n = self.num_vars if num_vars is None else num_vars
        merged = dict(self.terms)
        for key, coeff in extra.items():
            k = _norm_key(key)
            merged[k] = merged.get(k, 0.0) + float(coeff)
        return PseudoBooleanPoly(n, merged)

    def __repr__(self) -> str:
        return f"PseudoBooleanPoly(num_vars={self.num_vars}, terms={len(self.terms)})"


@dataclass(frozen=True)
class QuboModel:
    """Quadratic model over binaries: energy(x) = x^T q x + c^T x + offset.

    q is symmetric with a zero diagonal by convention; x^T q x counts both
    the (i, j) and (j, i) entries, so a term a*x_i*x_j contributes a/2 to
    each.  Diagonal mass is folded into the linear part (x_i^2 = x_i).
    """

    n: int
    q: np.ndarray
    c: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if q.shape != (self.n, self.n) or c.shape != (self.n,):
            raise ValueError("inconsistent QUBO shapes")
        if not np.allclose(q, q.T, atol=1e-12):
            raise ValueError("q must be symmetric")
        if np.any(np.abs(np.diag(q)) > 1e-12):
            raise ValueError("q must have a zero diagonal (fold it into c)")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)

    def energy(self, bits) -> float:
        x = np.asarray(bits, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"assignment length {x.shape} != n {self.n}")
        if not np.all((x == 0) | (x == 1)):
            raise ValueError("QUBO assignments must be 0/1")
        return float(x @ self.q @ x + self.c @ x + self.offset)

    def energies(self, bit_rows: np.ndarray) -> np.ndarray:
        """Vectorized energies for a (rows, n) matrix of 0/1 assignments."""
        x = np.asarray(bit_rows, dtype=float)
        return np.einsum("bi,ij,bj->b", x, self.q, x) + x @ self.c + self.offset


@dataclass(frozen=True)
class IsingModel:
    """Spin model: energy(z) = sum_{i<j} r_ij z_i z_j + sum_i h_i z_i + offset."""

    n: int
    r: dict[tuple[int, int], float]
    h: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.shape != (self.n,):
            raise ValueError("field vector length != n")
        for (i, j), _ in self.r.items():
            if not (0 <= i < j < self.n):
                raise ValueError(f"coupling key {(i, j)} must satisfy 0 <= i < j < n")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "r", dict(self.r))

    def energy(self, spins) -> float:
        z = np.asarray(spins, dtype=float)
        if z.shape != (self.n,):
            raise ValueError(f"assignment length {z.shape} != n {self.n}")
        if not np.all((z == 1) | (z == -1)):
            raise ValueError("Ising assignments must be -1/+1")
        e = float(self.h @ z) + self.offset
        for (i, j), rij in self.r.items():
            e += rij * z[i] * z[j]
        return float(e)

    def energies(self, spin_rows: np.ndarray) -> np.ndarray:
        """Vectorized energies for a (rows, n) matrix of -1/+1 assignments."""
        z = np.asarray(spin_rows, dtype=float)
        e = z @ self.h + self.offset
        for (i, j), rij in self.r.items():
            e += rij * z[:, i] * z[:, j]
        return e


def qubo_to_ising(q: QuboModel) -> IsingModel:
    """Exact change of variables x = (1 - z) / 2.

    Energies agree assignment-for-assignment; all constants are absorbed
    into the offset.
    """
    h = np.zeros(q.n)
    r: dict[tuple[int, int], float] = {}
    offset = q.offset
    for i in range(q.n):
        for j in range(i + 1, q.n):
            a = 2.0 * q.q[i, j]  # total coefficient of x_i x_j
            if a == 0.0:
                continue
            r[(i, j)] = a / 4.0
            h[i] -= a / 4.0
            h[j] -= a / 4.0
            offset += a / 4.0
    for i in range(q.n):
        ci = q.c[i]
        h[i] -= ci / 2.0
        offset += ci / 2.0
    r = {k: v for k, v in r.items() if v != 0.0}
    return IsingModel(n=q.n, r=r, h=h, offset=offset)


def ising_to_qubo(m: IsingModel) -> QuboModel:
    """Inverse transform z = 1 - 2x (round-trips with qubo_to_ising)."""
    q = np.zeros((m.n, m.n))
    c = np.zeros(m.n)
    offset = m.offset
    for (i, j), rij in m.r.items():
        # z_i z_j = 1 - 2x_i - 2x_j + 4 x_i x_j
        q[i, j] += 2.0 * rij
        q[j, i] += 2.0 * rij
        c[i] -= 2.0 * rij
        c[j] -= 2.0 * rij
        offset += rij
    for i in range(m.n):
        c[i] -= 2.0 * m.h[i]
        offset += m.h[i]
    return QuboModel(n=m.n, q=q, c=c, offset=offset)


def _square_expansion(expr: LinearExpr) -> dict[Key, float]:
    """Expand (a^T x + const)^2 into at-most-quadratic terms using x_i^2 = x_i."""
    items = sorted((i, a) for i, a in expr.coeffs.items() if a != 0.0)
    c = expr.constant
    out: dict[Key, float] = {(): c * c}
    for pos, (i, a) in enumerate(items):
        out[(i,)] = a * a + 2.0 * c * a
        for j, b in items[pos + 1:]:
            out[(i, j)] = 2.0 * a * b
    return out


def add_equality_penalty(p: PseudoBooleanPoly, expr: LinearExpr, weight: float) -> PseudoBooleanPoly:
    """Add weight * (a^T x + const)^2 to the polynomial.

    For an equality constraint a^T x = b, pass const = -b.  The penalty is
    zero exactly on satisfying assignments and positive elsewhere.
    """
    if weight < 0:
        raise ValueError("penalty weight must be nonnegative")
    for i in expr.coeffs:
        if not 0 <= i < p.num_vars:
            raise ValueError(f"expression references unregistered variable {i}")
    if weight == 0 or expr.is_zero():
        return p
    expanded = {k: weight * v for k, v in _square_expansion(expr).items()}
    return p.plus_terms(expanded)


def add_unbalanced_penalty(
    p: PseudoBooleanPoly, g: LinearExpr, lambda1: float, lambda2: float
) -> PseudoBooleanPoly:
    """Add lambda1*g + lambda2*g^2 for a linear violation measure g.

    g > 0 means the underlying inequality is violated; the quadratic term
    keeps the result QUBO-compatible in place of an exact (monotone)
    penalty, so feasible assignments generally pick up small nonzero
    contributions.
    """
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("unbalanced penalty weights must be nonnegative")
    for i in g.coeffs:
        if not 0 <= i < p.num_vars:
            raise ValueError(f"expression references unregistered variable {i}")
    if g.is_zero():
        return p
    extra: dict[Key, float] = {(): lambda1 * g.constant}
    for i, a in g.coeffs.items():
        extra[(i,)] = extra.get((i,), 0.0) + lambda1 * a
    for k, v in _square_expansion(g).items():
        extra[k] = extra.get(k, 0.0) + lambda2 * v
    return p.plus_terms(extra)


def encode_slack_inequality(
    p: PseudoBooleanPoly,
    coeffs: dict[int, float],
    bound: float,
    weight: float,
    registry: VarRegistry | None = None,
) -> tuple[PseudoBooleanPoly, list[int]]:
    """Exactly encode a^T x <= b with binary slack bits.

    Appends K = ceil(log2(b - min_x a^T x + 1)) slack variables s_k with
    powers-of-two weights and adds weight * (a^T x + sum_k 2^k s_k - b)^2.
    Minimizing over the slack bits makes the penalty zero iff a^T x <= b.
    Coefficients and bound must be integer-valued; rescale beforehand where
    the units allow it.
    """
    if weight < 0:
        raise ValueError("penalty weight must be nonnegative")
    for i, a in coeffs.items():
        if not 0 <= i < p.num_vars:
            raise ValueError(f"constraint references unregistered variable {i}")
        if float(a) != int(a):
            raise ValueError(f"slack encoding requires integer coefficients, got {a}")
    if float(bound) != int(bound):
        raise ValueError(f"slack encoding requires an integer bound, got {bound}")
    bound = int(bound)
    min_lhs = sum(min(0, int(a)) for a in coeffs.values())
    slack_range = bound - min_lhs
    if slack_range < 0:
        raise InfeasibleConstraintError(
            f"constraint is unsatisfiable: bound {bound} < minimum lhs {min_lhs}"
        )
    k_bits = math.ceil(math.log2(slack_range + 1)) if slack_range > 0 else 0
    base = p.num_vars
    slack_ids = list(range(base, base + k_bits))
    if registry is not None:
        for k, idx in enumerate(slack_ids):
            registry.add(f"s{idx}", VAR_SLACK)
    lin = {i: float(int(a)) for i, a in coeffs.items()}
    for k, idx in enumerate(slack_ids):
        lin[idx] = float(1 << k)
    expr = LinearExpr(coeffs=lin, constant=-float(bound))
    widened = p.plus_terms({}, num_vars=base + k_bits)
    return add_equality_penalty(widened, expr, weight), slack_ids


def product_penalty_terms(x: int, y: int, w: int) -> dict[Key, float]:
    """Penalty enforcing w = x*y: 3w + xy - 2xw - 2yw.

    Zero on the four consistent (x, y, w=xy) assignments and >= 1 on the
    four inconsistent ones.
    """
    return {(w,): 3.0, _norm_key((x, y)): 1.0, _norm_key((x, w)): -2.0, _norm_key((y, w)): -2.0}


def rosenberg_quadratize(
    p: PseudoBooleanPoly,
    weight: float,
    registry: VarRegistry | None = None,
) -> tuple[PseudoBooleanPoly, dict[tuple[int, int], int]]:
    """Reduce a degree-3 polynomial to degree 2 with auxiliary product variables.

    Each cubic term x_i x_j x_k (indices sorted) is rewritten as w * x_k
    where w stands for x_i x_j, and the product penalty weight * (3w + x_i x_j
    - 2 x_i w - 2 x_j w) pins w to the product at any minimum once weight
    exceeds the coefficient scale.  Auxiliary variables are shared across
    cubic terms with the same leading pair.  Returns the quadratic
    polynomial and the (i, j) -> aux index map.
    """
    if weight < 0:
        raise ValueError("penalty weight must be nonnegative")
    deg = p.degree()
    if deg > 3:
        raise ValueError(
            f"quadratization supports degree <= 3, got degree {deg}; "
            "chain reductions for higher orders are out of scope"
        )
    if deg <= 2:
        return p, {}

    aux: dict[tuple[int, int], int] = {}
    next_var = p.num_vars
    new_terms: dict[Key, float] = {}
    penalties: dict[Key, float] = {}
    for key, coeff in p.terms.items():
        if len(key) < 3:
            new_terms[key] = new_terms.get(key, 0.0) + coeff
            continue
        i, j, k = key
        pair = (i, j)
        if pair not in aux:
            aux[pair] = next_var
            next_var += 1
            for pkey, pcoeff in product_penalty_terms(i, j, aux[pair]).items():
                penalties[pkey] = penalties.get(pkey, 0.0) + weight * pcoeff
        w = aux[pair]
        wkey = _norm_key((w, k))
        new_terms[wkey] = new_terms.get(wkey, 0.0) + coeff
    for pkey, pcoeff in penalties.items():
        new_terms[pkey] = new_terms.get(pkey, 0.0) + pcoeff
    if registry is not None:
        for (i, j), idx in sorted(aux.items(), key=lambda kv: kv[1]):
            registry.add(f"and{i}_{j}", VAR_AUX_PRODUCT)
    return PseudoBooleanPoly(next_var, new_terms), aux


def to_qubo(p: PseudoBooleanPoly) -> QuboModel:
    """Normalize a degree <= 2 polynomial into matrix/vector/offset form."""
    if p.degree() > 2:
        raise ValueError(f"polynomial has degree {p.degree()}, expected <= 2")
    n = p.num_vars
    q = np.zeros((n, n))
    c = np.zeros(n)
    offset = 0.0
    for key, coeff in p.terms.items():
        if len(key) == 0:
            offset += coeff
        elif len(key) == 1:
            c[key[0]] += coeff
        else:
            i, j = key
            q[i, j] += coeff / 2.0
            q[j, i] += coeff / 2.0
    return QuboModel(n=n, q=q, c=c, offset=offset)
