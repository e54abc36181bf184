"""Boost-converter output-filter selection as a penalized QUBO.

The engineering problem: pick exactly one inductor and one capacitor from a
catalog, minimizing monetary cost, subject to ripple limits on inductor
current and capacitor voltage and a resonance-frequency margin below the
switching frequency.  Ripple limits are handled by preprocessing the
catalog; the one-hot selections, product-consistency variables z_ij =
xL_i * xC_j, and the resonance inequality become penalty blocks with
weights M1..M6.

Variable order is xL_0.., xC_0.., z_00, z_01, .. (z row-major by inductor),
with qubit 0 as the most significant bit of a basis index.

The resonance violation used by the unbalanced penalty blocks (M5, M6) is
measured relative to the LC threshold (kappa / (2*pi*f_sw))^2:

    g(x) = 1 - sum_ij z_ij * L_i * C_j / threshold

so g > 0 means the constraint is violated and coefficients stay O(1)
regardless of component units.  Published weight sets in the few-unit range
produce the documented spectra only under this normalization; raw
henry-farad products (~1e-9) would need weights nine orders of magnitude
larger.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import bitconv
from .errors import InfeasibleConstraintError
from .pbool import (
    VAR_AUX_PRODUCT,
    VAR_DECISION,
    LinearExpr,
    PseudoBooleanPoly,
    QuboModel,
    VarRegistry,
    add_equality_penalty,
    add_unbalanced_penalty,
    product_penalty_terms,
    to_qubo,
)

BUILTIN_INSTANCES = ("instance1", "instance2", "instance3")


@dataclass(frozen=True)
class ConverterSpec:
    """Operating point and ripple/resonance requirements.

    v_o is the ideal continuous-conduction output voltage v_s / (1 - d).
    """

    v_s: float
    r_load: float
    d: float
    f_sw: float
    di_max: float
    dv_max: float
    kappa: float

    def __post_init__(self):
        for name in ("v_s", "r_load", "f_sw", "di_max", "dv_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.d < 1:
            raise ValueError("duty cycle must lie strictly inside (0, 1)")
        if self.kappa <= 1:
            raise ValueError("resonance safety factor kappa must exceed 1")

    @property
    def v_o(self) -> float:
        return self.v_s / (1.0 - self.d)

    @property
    def lc_threshold(self) -> float:
        """Minimum L*C product (s^2) keeping f_res <= f_sw / kappa."""
        return (self.kappa / (2.0 * math.pi * self.f_sw)) ** 2

    @property
    def min_inductance(self) -> float:
        return self.d * self.v_s / (2.0 * self.f_sw * self.di_max)

    @property
    def min_capacitance(self) -> float:
        return self.d * self.v_o / (2.0 * self.f_sw * self.r_load * self.dv_max)


@dataclass(frozen=True)
class Component:
    value: float  # henries or farads
    cost: float  # euros

    def __post_init__(self):
        if self.value <= 0 or self.cost <= 0:
            raise ValueError("component value and cost must be positive")


@dataclass(frozen=True)
class ComponentCatalog:
    inductors: tuple[Component, ...]
    capacitors: tuple[Component, ...]

    def __post_init__(self):
        if not self.inductors or not self.capacitors:
            raise ValueError("catalog must offer at least one inductor and one capacitor")
        object.__setattr__(self, "inductors", tuple(self.inductors))
        object.__setattr__(self, "capacitors", tuple(self.capacitors))


@dataclass(frozen=True)
class PenaltyWeights:
    m1: float = 5.0
    m2: float = 5.0
    m3: float = 5.0
    m4: float = 5.0
    m5: float = 0.0
    m6: float = 0.0

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "m4", "m5", "m6"):
            if getattr(self, name) < 0:
                raise ValueError(f"penalty weight {name} must be nonnegative")


def ripple_current(inductance: float, spec: ConverterSpec) -> float:
    """Peak inductor current ripple v_s * d / (2 * L * f_sw)."""
    if inductance <= 0:
        raise ValueError("inductance must be positive")
    return spec.v_s * spec.d / (2.0 * inductance * spec.f_sw)


def ripple_voltage(capacitance: float, spec: ConverterSpec) -> float:
    """Peak capacitor voltage ripple v_o * d / (2 * R * C * f_sw)."""
    if capacitance <= 0:
        raise ValueError("capacitance must be positive")
    return spec.v_o * spec.d / (2.0 * spec.r_load * capacitance * spec.f_sw)


def resonance(inductance: float, capacitance: float) -> float:
    """Output-filter resonance frequency 1 / (2*pi*sqrt(L*C))."""
    if inductance <= 0 or capacitance <= 0:
        raise ValueError("component values must be positive")
    return 1.0 / (2.0 * math.pi * math.sqrt(inductance * capacitance))


class DesignInstance:
    """A preprocessed catalog plus the variable layout of its encoding."""

    def __init__(self, spec: ConverterSpec, inductors, capacitors) -> None:
        self.spec = spec
        self.inductors = tuple(inductors)
        self.capacitors = tuple(capacitors)
        self.registry = VarRegistry()
        for i in range(len(self.inductors)):
            self.registry.add(f"xL{i}", VAR_DECISION)
        for j in range(len(self.capacitors)):
            self.registry.add(f"xC{j}", VAR_DECISION)
        for i in range(len(self.inductors)):
            for j in range(len(self.capacitors)):
                self.registry.add(f"z{i}_{j}", VAR_AUX_PRODUCT)

    @property
    def n_inductors(self) -> int:
        return len(self.inductors)

    @property
    def n_capacitors(self) -> int:
        return len(self.capacitors)

    @property
    def n_qubits(self) -> int:
        nl, nc = self.n_inductors, self.n_capacitors
        return nl + nc + nl * nc

    def z_index(self, i: int, j: int) -> int:
        return self.n_inductors + self.n_capacitors + i * self.n_capacitors + j

    def _split_bits(self, bits: np.ndarray):
        nl, nc = self.n_inductors, self.n_capacitors
        return bits[..., :nl], bits[..., nl:nl + nc], bits[..., nl + nc:]

    def feasibility_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized original-problem feasibility and cost per basis index.

        Feasible means: exactly one inductor, exactly one capacitor, every
        z_ij equal to xL_i * xC_j, the selected L*C product at or above the
        resonance threshold, and the (preprocessing-guaranteed) ripple
        limits re-checked.
        """
        size = 1 << self.n_qubits
        bits = bitconv.bit_matrix(np.arange(size, dtype=np.int64), self.n_qubits)
        xl, xc, z = self._split_bits(bits)
        l_vals = np.array([c.value for c in self.inductors])
        c_vals = np.array([c.value for c in self.capacitors])
        one_hot = (xl.sum(axis=1) == 1) & (xc.sum(axis=1) == 1)
        outer = (xl[:, :, None] * xc[:, None, :]).reshape(size, -1)
        z_consistent = np.all(z == outer, axis=1)
        l_sel = xl @ l_vals
        c_sel = xc @ c_vals
        resonance_ok = l_sel * c_sel >= self.spec.lc_threshold
        ripple_ok = (l_sel >= self.spec.min_inductance - 1e-18) & (
            c_sel >= self.spec.min_capacitance - 1e-18
        )
        costs = xl @ np.array([c.cost for c in self.inductors]) + xc @ np.array(
            [c.cost for c in self.capacitors]
        )
        return one_hot & z_consistent & resonance_ok & ripple_ok, costs

    def violation_table(self) -> np.ndarray:
        """Normalized resonance violation g per basis index (g > 0 = violated)."""
        size = 1 << self.n_qubits
        bits = bitconv.bit_matrix(np.arange(size, dtype=np.int64), self.n_qubits)
        _, _, z = self._split_bits(bits)
        lc = self._lc_normalized()
        return 1.0 - z @ lc

    def _lc_normalized(self) -> np.ndarray:
        tau = self.spec.lc_threshold
        return np.array(
            [
                li.value * cj.value / tau
                for li in self.inductors
                for cj in self.capacitors
            ]
        )


@dataclass(frozen=True)
class DesignQubo:
    model: QuboModel
    weights: PenaltyWeights
    instance: DesignInstance


@dataclass(frozen=True)
class DesignSolution:
    """Decoded engineering view of one basis state."""

    inductor: int | None
    capacitor: int | None
    cost: float | None
    ripple_current: float | None
    ripple_voltage: float | None
    resonance_freq: float | None
    one_hot_ok: bool
    z_consistent: bool
    resonance_ok: bool
    ripple_ok: bool

    @property
    def feasible(self) -> bool:
        return self.one_hot_ok and self.z_consistent and self.resonance_ok and self.ripple_ok


def derived_output_voltage(spec: ConverterSpec) -> float:
    """Ideal continuous-conduction boost gain: v_o = v_s / (1 - d)."""
    return spec.v_o


def preprocess(catalog: ComponentCatalog, spec: ConverterSpec) -> DesignInstance:
    """Drop components that violate the ripple limits on their own.

    Keeps L >= d*v_s / (2*f_sw*di_max) and C >= d*v_o / (2*f_sw*R*dv_max);
    components sitting exactly at a limit are retained.
    """
    kept_l = [c for c in catalog.inductors if c.value >= spec.min_inductance - 1e-18]
    kept_c = [c for c in catalog.capacitors if c.value >= spec.min_capacitance - 1e-18]
    if not kept_l:
        raise InfeasibleConstraintError(
            f"no inductor reaches the ripple minimum {spec.min_inductance:.3e} H"
        )
    if not kept_c:
        raise InfeasibleConstraintError(
            f"no capacitor reaches the ripple minimum {spec.min_capacitance:.3e} F"
        )
    return DesignInstance(spec, kept_l, kept_c)


def build_qubo(instance: DesignInstance, weights: PenaltyWeights) -> DesignQubo:
    """Assemble the penalized quadratic objective over the instance layout.

    Blocks: component costs; M1/M2 one-hot selections; M3 product
    consistency (3z + xy - 2xz - 2yz per pair); M4 exactly-one-z; M5/M6
    unbalanced resonance penalty on the normalized violation g.
    """
    nl, nc = instance.n_inductors, instance.n_capacitors
    nq = instance.n_qubits
    terms = {(i,): instance.inductors[i].cost for i in range(nl)}
    for j in range(nc):
        terms[(nl + j,)] = instance.capacitors[j].cost
    p = PseudoBooleanPoly(nq, terms)

    p = add_equality_penalty(p, LinearExpr({i: 1.0 for i in range(nl)}, -1.0), weights.m1)
    p = add_equality_penalty(
        p, LinearExpr({nl + j: 1.0 for j in range(nc)}, -1.0), weights.m2
    )
    consistency: dict = {}
    for i in range(nl):
        for j in range(nc):
            for key, coeff in product_penalty_terms(i, nl + j, instance.z_index(i, j)).items():
                consistency[key] = consistency.get(key, 0.0) + weights.m3 * coeff
    p = p.plus_terms(consistency)
    z_ids = [instance.z_index(i, j) for i in range(nl) for j in range(nc)]
    p = add_equality_penalty(p, LinearExpr({zid: 1.0 for zid in z_ids}, -1.0), weights.m4)

    lc = instance._lc_normalized()
    g = LinearExpr({zid: -lc[k] for k, zid in enumerate(z_ids)}, 1.0)
    p = add_unbalanced_penalty(p, g, weights.m5, weights.m6)
    return DesignQubo(model=to_qubo(p), weights=weights, instance=instance)


def decode(instance: DesignInstance, basis_index: int) -> DesignSolution:
    """Split a basis state back into component choices and constraint flags."""
    bits = bitconv.index_to_bits(basis_index, instance.n_qubits)
    xl, xc, z = instance._split_bits(bits)
    spec = instance.spec
    one_hot = int(xl.sum()) == 1 and int(xc.sum()) == 1
    expected = np.outer(xl, xc).reshape(-1)
    z_consistent = bool(np.all(z == expected))
    l_idx = int(np.argmax(xl)) if int(xl.sum()) == 1 else None
    c_idx = int(np.argmax(xc)) if int(xc.sum()) == 1 else None
    if l_idx is not None and c_idx is not None:
        l_val = instance.inductors[l_idx].value
        c_val = instance.capacitors[c_idx].value
        cost = instance.inductors[l_idx].cost + instance.capacitors[c_idx].cost
        d_i = ripple_current(l_val, spec)
        d_v = ripple_voltage(c_val, spec)
        f_res = resonance(l_val, c_val)
        resonance_ok = l_val * c_val >= spec.lc_threshold
        ripple_ok = d_i <= spec.di_max + 1e-12 and d_v <= spec.dv_max + 1e-12
    else:
        cost = d_i = d_v = f_res = None
        resonance_ok = False
        ripple_ok = False
    return DesignSolution(
        inductor=l_idx,
        capacitor=c_idx,
        cost=cost,
        ripple_current=d_i,
        ripple_voltage=d_v,
        resonance_freq=f_res,
        one_hot_ok=one_hot,
        z_consistent=z_consistent,
        resonance_ok=resonance_ok,
        ripple_ok=ripple_ok,
    )


def reference_spec() -> ConverterSpec:
    """The bundled converter operating point (12 V in, 10 ohm, 100 kHz)."""
    return ConverterSpec(
        v_s=12.0, r_load=10.0, d=0.5, f_sw=1e5, di_max=3.0, dv_max=0.2, kappa=15.0
    )


def _instance_from_dict(data: dict) -> tuple[DesignInstance, PenaltyWeights | None]:
    s = data["spec"]
    spec = ConverterSpec(
        v_s=float(s["v_s"]),
        r_load=float(s["R"]),
        d=float(s["d"]),
        f_sw=float(s["f_sw"]),
        di_max=float(s["di_max"]),
        dv_max=float(s["dv_max"]),
        kappa=float(s["kappa"]),
    )
    catalog = ComponentCatalog(
        inductors=tuple(
            Component(value=float(e["uH"]) * 1e-6, cost=float(e["cost"]))
            for e in data["inductors"]
        ),
        capacitors=tuple(
            Component(value=float(e["uF"]) * 1e-6, cost=float(e["cost"]))
            for e in data["capacitors"]
        ),
    )
    weights = None
    if "weights" in data:
        w = data["weights"]
        weights = PenaltyWeights(
            m1=float(w.get("M1", 5.0)),
            m2=float(w.get("M2", 5.0)),
            m3=float(w.get("M3", 5.0)),
            m4=float(w.get("M4", 5.0)),
            m5=float(w.get("M5", 0.0)),
            m6=float(w.get("M6", 0.0)),
        )
    return preprocess(catalog, spec), weights


def load_instance(path) -> tuple[DesignInstance, PenaltyWeights | None]:
    """Read an instance JSON file (values in uH/uF, costs in euros)."""
    with open(path, encoding="utf-8") as fh:
        return _instance_from_dict(json.load(fh))


def builtin_instance(name: str) -> tuple[DesignInstance, PenaltyWeights]:
    """One of the three bundled catalog instances with its published weights."""
    if name not in BUILTIN_INSTANCES:
        raise ValueError(f"unknown built-in instance {name!r}; choose from {BUILTIN_INSTANCES}")
    text = resources.files("qubokit.instances").joinpath(f"{name}.json").read_text()
    instance, weights = _instance_from_dict(json.loads(text))
    assert weights is not None
    return instance, weights
