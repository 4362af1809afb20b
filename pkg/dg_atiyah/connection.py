"""Torsion-free affine connections on E[-1], given as triples (Gamma^M, Gamma^E, beta).

Index conventions (0-based):
    gamma_m[(i, j, k)]      nabla^M_{d_i} d_j = sum_k gamma_m[i,j,k] d_k
    gamma_e[(i, a, k)]      nabla^E_{d_i} e_a = sum_k gamma_e[i,a,k] e_k
    beta[(i, j, a, k)]      beta(d_i, d_j) e_a = sum_k beta[i,j,a,k] e_k

The horizontal lift of d_i is  X_i = d/dx^i - sum_{a,k} gamma_e[i,a,k] xi^a d/dxi^k.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import StructuralError
from .graded import GradedVectorField, Section, SuperFunction, bracket
from .ring import Poly

logger = logging.getLogger(__name__)


def _freeze(variables: tuple[str, ...], entries: Mapping, arity: int, bounds: tuple[int, ...]):
    frozen = {}
    for key, value in dict(entries or {}).items():
        key = tuple(key)
        if len(key) != arity or any(not 0 <= k < b for k, b in zip(key, bounds)):
            raise StructuralError(f"connection index {key!r} out of range {bounds}")
        if not isinstance(value, Poly):
            value = Poly.constant(variables, value)
        if value.variables != variables:
            raise StructuralError(f"connection entry over {value.variables}, expected {variables}")
        if value:
            frozen[key] = value
    return MappingProxyType(frozen)


@dataclass(frozen=True)
class ConnectionTriple:
    variables: tuple[str, ...]
    m: int
    gamma_m: Mapping[tuple[int, int, int], Poly] = field(default_factory=dict)
    gamma_e: Mapping[tuple[int, int, int], Poly] = field(default_factory=dict)
    beta: Mapping[tuple[int, int, int, int], Poly] = field(default_factory=dict)

    def __post_init__(self):
        variables = tuple(self.variables)
        n, m = len(variables), self.m
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "gamma_m", _freeze(variables, self.gamma_m, 3, (n, n, n)))
        object.__setattr__(self, "gamma_e", _freeze(variables, self.gamma_e, 3, (n, m, m)))
        object.__setattr__(self, "beta", _freeze(variables, self.beta, 4, (n, n, m, m)))

    @classmethod
    def trivial(cls, variables: Sequence[str], m: int) -> "ConnectionTriple":
        return cls(tuple(variables), m)

    @classmethod
    def compatible(
        cls,
        variables: Sequence[str],
        m: int,
        gamma_m: Mapping,
        gamma_e: Mapping,
        symmetric_beta: Mapping,
    ) -> "ConnectionTriple":
        """A valid triple with beta = S - R/2, where S is symmetrized over (i, j) first."""
        variables = tuple(variables)
        n = len(variables)
        base = cls(variables, m, gamma_m=gamma_m, gamma_e=gamma_e)
        R = curvature(base)
        S = _freeze(variables, symmetric_beta, 4, (n, n, m, m))
        zero = Poly.zero(variables)
        beta = {}
        for i in range(n):
            for j in range(n):
                for a in range(m):
                    for k in range(m):
                        sym = (S.get((i, j, a, k), zero) + S.get((j, i, a, k), zero)) * Fraction(1, 2)
                        beta[(i, j, a, k)] = sym - R(i, j, a, k) * Fraction(1, 2)
        symmetric_m = {}
        for (i, j, k), value in dict(base.gamma_m).items():
            symmetric_m[(i, j, k)] = symmetric_m.get((i, j, k), zero) + value * Fraction(1, 2)
            symmetric_m[(j, i, k)] = symmetric_m.get((j, i, k), zero) + value * Fraction(1, 2)
        return cls(variables, m, gamma_m=symmetric_m, gamma_e=base.gamma_e, beta=beta)

    @property
    def n(self) -> int:
        return len(self.variables)

    def _zero(self) -> Poly:
        return Poly.zero(self.variables)

    def christoffel(self, i: int, j: int, k: int) -> Poly:
        return self.gamma_m.get((i, j, k)) or self._zero()

    def fiber_coefficient(self, i: int, a: int, k: int) -> Poly:
        return self.gamma_e.get((i, a, k)) or self._zero()

    def beta_entry(self, i: int, j: int, a: int, k: int) -> Poly:
        return self.beta.get((i, j, a, k)) or self._zero()

    def is_trivial(self) -> bool:
        return not (self.gamma_m or self.gamma_e or self.beta)

    def degree(self) -> int:
        entries = list(self.gamma_m.values()) + list(self.gamma_e.values()) + list(self.beta.values())
        return max((p.total_degree for p in entries), default=-1)


@dataclass(frozen=True)
class CurvatureTensor:
    variables: tuple[str, ...]
    m: int
    entries: Mapping[tuple[int, int, int, int], Poly]

    def __call__(self, i: int, j: int, a: int, k: int) -> Poly:
        return self.entries.get((i, j, a, k)) or Poly.zero(self.variables)

    def is_zero(self) -> bool:
        return not any(self.entries.values())


@dataclass(frozen=True)
class Violation:
    kind: str  # "torsion" | "beta"
    index: tuple[int, ...]  # 1-based
    detail: str

    def __str__(self) -> str:
        label = ",".join(str(i) for i in self.index)
        return f"{self.kind} violation at ({label}): {self.detail}"


def curvature(triple: ConnectionTriple) -> CurvatureTensor:
    """R(d_i, d_j) e_a = nabla_i nabla_j e_a - nabla_j nabla_i e_a."""
    n, m = triple.n, triple.m
    G = triple.fiber_coefficient
    entries = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for a in range(m):
                for l in range(m):
                    value = G(j, a, l).partial(i) - G(i, a, l).partial(j)
                    for k in range(m):
                        value = value + G(j, a, k) * G(i, k, l) - G(i, a, k) * G(j, k, l)
                    if value:
                        entries[(i, j, a, l)] = value
    return CurvatureTensor(triple.variables, m, MappingProxyType(entries))


def validate(triple: ConnectionTriple) -> list[Violation]:
    violations = []
    n, m = triple.n, triple.m
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                left, right = triple.christoffel(i, j, k), triple.christoffel(j, i, k)
                if left != right:
                    violations.append(
                        Violation("torsion", (i + 1, j + 1, k + 1), f"Gamma^M {left} != {right}")
                    )
    R = curvature(triple)
    for i in range(n):
        for j in range(i + 1, n):
            for a in range(m):
                for k in range(m):
                    skew = triple.beta_entry(i, j, a, k) - triple.beta_entry(j, i, a, k)
                    if skew != -R(i, j, a, k):
                        violations.append(
                            Violation(
                                "beta",
                                (i + 1, j + 1, a + 1, k + 1),
                                f"beta skew part {skew} != -R = {-R(i, j, a, k)}",
                            )
                        )
    if violations:
        logger.debug("connection has %d violation(s)", len(violations))
    return violations


def covariant_derivative_section(triple: ConnectionTriple, i: int, s: Section) -> Section:
    """nabla^E_{d_i} s with components d_i s^k + sum_a Gamma^E[i][a][k] s^a."""
    if s.variables != triple.variables or s.m != triple.m:
        raise StructuralError("section and connection live on different bundles")
    components = []
    for k in range(s.m):
        value = s.components[k].partial(i)
        for a in range(s.m):
            value = value + triple.fiber_coefficient(i, a, k) * s.components[a]
        components.append(value)
    return Section(s.variables, tuple(components))


def endomorphism_field(variables: Sequence[str], m: int, matrix) -> GradedVectorField:
    """iota of a fiber endomorphism B: sum_{a,k} B[a][k] xi^a d/dxi^k."""
    variables = tuple(variables)
    xis = []
    for k in range(m):
        comp = SuperFunction.zero(variables, m)
        for a in range(m):
            entry = matrix(a, k)
            if entry:
                comp = comp + SuperFunction.xi(variables, m, a) * entry
        xis.append(comp)
    zero = SuperFunction.zero(variables, m)
    return GradedVectorField(variables, m, [zero] * len(variables), xis)


def horizontal_lift(triple: ConnectionTriple, i: int) -> GradedVectorField:
    coord = GradedVectorField.coordinate(triple.variables, triple.m, i)
    rotation = endomorphism_field(
        triple.variables, triple.m, lambda a, k: triple.fiber_coefficient(i, a, k)
    )
    return coord - rotation


class LiftedFrame:
    """The lifted basis {X_1..X_n, iota_1..iota_m} of a triple, with the connection on it."""

    def __init__(self, triple: ConnectionTriple):
        self.triple = triple
        self.variables = triple.variables
        self.n, self.m = triple.n, triple.m
        self.lifts = [horizontal_lift(triple, i) for i in range(self.n)]
        self.iotas = [GradedVectorField.fiber(self.variables, self.m, b) for b in range(self.m)]
        self._lift_xi = [
            [lift.xi_components[b] for b in range(self.m)] for lift in self.lifts
        ]
        self._nabla_lifts = {}
        for i in range(self.n):
            for j in range(self.n):
                value = endomorphism_field(
                    self.variables, self.m, lambda a, k: triple.beta_entry(i, j, a, k)
                )
                for c in range(self.n):
                    coeff = triple.christoffel(i, j, c)
                    if coeff:
                        value = value + self.lifts[c].scale(coeff)
                self._nabla_lifts[(i, j)] = value
        self._nabla_iotas = {}
        for i in range(self.n):
            for b in range(self.m):
                self._nabla_iotas[(i, b)] = self._fiber_image(i, b)

    def _fiber_image(self, i: int, b: int) -> GradedVectorField:
        result = GradedVectorField.zero(self.variables, self.m)
        for k in range(self.m):
            coeff = self.triple.fiber_coefficient(i, b, k)
            if coeff:
                result = result + self.iotas[k].scale(coeff)
        return result

    def coefficients(self, Y: GradedVectorField) -> tuple[list[SuperFunction], list[SuperFunction]]:
        """Y = sum_j f_j X_j + sum_b g_b iota_b with left coefficients."""
        if Y.variables != self.variables or Y.m != self.m:
            raise StructuralError("vector field and connection live on different graded manifolds")
        f = list(Y.x_components)
        g = []
        for b in range(self.m):
            value = Y.xi_components[b]
            for j in range(self.n):
                if f[j]:
                    value = value - f[j] * self._lift_xi[j][b]
            g.append(value)
        return f, g

    def recombine(self, f: Sequence[SuperFunction], g: Sequence[SuperFunction]) -> GradedVectorField:
        result = GradedVectorField.zero(self.variables, self.m)
        for j, coeff in enumerate(f):
            if coeff:
                result = result + self.lifts[j].scale(coeff)
        for b, coeff in enumerate(g):
            if coeff:
                result = result + self.iotas[b].scale(coeff)
        return result

    def _along_lift(self, i: int, f, g) -> GradedVectorField:
        lift = self.lifts[i]
        result = self.recombine([lift.apply(c) for c in f], [lift.apply(c) for c in g])
        for j, coeff in enumerate(f):
            if coeff:
                result = result + self._nabla_lifts[(i, j)].scale(coeff)
        for b, coeff in enumerate(g):
            if coeff:
                result = result + self._nabla_iotas[(i, b)].scale(coeff)
        return result

    def _along_iota(self, a: int, f, g) -> GradedVectorField:
        iota = self.iotas[a]
        return self.recombine([iota.apply(c) for c in f], [iota.apply(c) for c in g])

    def nabla(self, X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
        p, q = self.coefficients(X)
        f, g = self.coefficients(Y)
        result = GradedVectorField.zero(self.variables, self.m)
        for i, coeff in enumerate(p):
            if coeff:
                result = result + self._along_lift(i, f, g).scale(coeff)
        for a, coeff in enumerate(q):
            if coeff:
                result = result + self._along_iota(a, f, g).scale(coeff)
        return result

    def torsion(self, X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
        """nabla_X Y - (-1)^{|X||Y|} nabla_Y X - [X, Y] for homogeneous X, Y."""
        dx, dy = X.degree or 0, Y.degree or 0
        swapped = self.nabla(Y, X)
        value = self.nabla(X, Y)
        value = value + swapped if (dx * dy) % 2 else value - swapped
        return value - bracket(X, Y)


def nabla_on_fields(triple: ConnectionTriple, X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
    return LiftedFrame(triple).nabla(X, Y)


def torsion(triple: ConnectionTriple, X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
    return LiftedFrame(triple).torsion(X, Y)


def lifted_coefficients(
    triple: ConnectionTriple, Y: GradedVectorField
) -> tuple[list[SuperFunction], list[SuperFunction]]:
    return LiftedFrame(triple).coefficients(Y)
