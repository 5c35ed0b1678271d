"""Exact rational functions over QQ with formal function jets.

A :class:`Scalar` is a reduced fraction ``num/den`` of polynomials with
rational coefficients.  The indeterminates are plain names (chart
coordinates, formal constants) and *jets*: formal derivatives of declared
functions such as ``m(x6)``, ``m'(x6)``, ``m''(x6)``.  Jets of different
orders are independent transcendentals; differentiation links them by the
chain rule.

All polynomials live in one process-wide sympy ``PolyRing`` whose generators
are kept sorted by :func:`name_key`.  The ring grows when new names appear and
Scalars created in an older ring are converted lazily.  Reduction uses sympy's
polynomial gcd restricted to the generators actually occurring, which keeps
the gcd cheap when the global ring is wide.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from sympy import QQ, Symbol
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from .errors import (
    DivisionByZero,
    IncompleteValuation,
    PoleAtPoint,
    ScalarParseError,
    UnknownCoordinate,
)

__all__ = [
    "Scalar",
    "ScalarLike",
    "JetInfo",
    "declare_symbol",
    "declare_function",
    "jet_info",
    "jet_name",
    "name_key",
    "parse_scalar",
    "format_scalar",
    "scalar",
    "partial_derivative",
    "evaluate",
    "ZERO",
    "ONE",
]

ScalarLike = Union["Scalar", int, Fraction]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def name_key(name: str) -> tuple:
    """Sort key for generator names: plain names before jets, digits compared numerically."""
    is_jet = 1 if ("(" in name or "[" in name or "'" in name) else 0
    parts = []
    for chunk in re.split(r"(\d+)", name):
        if not chunk:
            continue
        parts.append((0, int(chunk), "") if chunk.isdigit() else (1, 0, chunk))
    return (is_jet, tuple(parts))


# ---------------------------------------------------------------------------
# jet registry


@dataclass(frozen=True)
class JetInfo:
    """A generator that is a derivative of a declared function."""

    symbol: str
    args: tuple[str, ...]
    orders: tuple[int, ...]

    @property
    def total_order(self) -> int:
        return sum(self.orders)


_lock = threading.RLock()
_functions: dict[str, tuple[str, ...]] = {}
_jets: dict[str, JetInfo] = {}


def _make_jet_name(symbol: str, args: tuple[str, ...], orders: tuple[int, ...]) -> str:
    if len(args) == 1:
        return f"{symbol}{chr(39) * orders[0]}({args[0]})"
    if not any(orders):
        return symbol
    parts = []
    for coord, k in zip(args, orders):
        parts.extend([coord] * k)
    return f"{symbol}[{','.join(parts)}]"


def declare_symbol(symbol: str, argument: str) -> str:
    """Declare a one-argument formal function; returns the name of its order-0 jet."""
    return declare_function(symbol, (argument,))


def declare_function(symbol: str, args: Iterable[str]) -> str:
    """Declare a formal function of ``args``.

    Redeclaring with different arguments replaces the previous declaration;
    jets already created keep their old meaning.  For several arguments the
    order-0 jet is the bare symbol name, which is how solver unknowns appear
    in templates.
    """
    args = tuple(args)
    if not _IDENT.fullmatch(symbol):
        raise ValueError(f"invalid function symbol {symbol!r}")
    if not args:
        raise ValueError("a formal function needs at least one argument")
    with _lock:
        _functions[symbol] = args
        name = _make_jet_name(symbol, args, (0,) * len(args))
        _jets[name] = JetInfo(symbol, args, (0,) * len(args))
    return name


def jet_name(symbol: str, orders: int | tuple[int, ...]) -> str:
    """Generator name for a jet of a declared function."""
    args = _functions[symbol]
    if isinstance(orders, int):
        orders = (orders,)
    with _lock:
        name = _make_jet_name(symbol, args, tuple(orders))
        _jets.setdefault(name, JetInfo(symbol, args, tuple(orders)))
    return name


def jet_info(name: str) -> JetInfo | None:
    """Registry entry for a generator name, or ``None`` for a plain name."""
    return _jets.get(name)


def _jet_step(name: str, coord: str) -> str | None:
    """Name of d(name)/d(coord) when ``name`` is a jet depending on ``coord``."""
    info = _jets.get(name)
    if info is None or coord not in info.args:
        return None
    i = info.args.index(coord)
    orders = list(info.orders)
    orders[i] += 1
    new = _make_jet_name(info.symbol, info.args, tuple(orders))
    with _lock:
        _jets.setdefault(new, JetInfo(info.symbol, info.args, tuple(orders)))
    return new


# ---------------------------------------------------------------------------
# global ring


class _RingState:
    def __init__(self) -> None:
        self.names: tuple[str, ...] = ()
        self.ring: PolyRing = PolyRing((Symbol("_one"),), QQ, lex)
        self.index: dict[str, int] = {}
        self._small: dict[tuple[str, ...], PolyRing] = {}

    def ensure(self, names: Iterable[str]) -> PolyRing:
        missing = [n for n in names if n not in self.index]
        if not missing:
            return self.ring
        with _lock:
            missing = [n for n in set(missing) if n not in self.index]
            if missing:
                new = tuple(sorted(set(self.names) | set(missing), key=name_key))
                self.ring = PolyRing(tuple(Symbol(n) for n in new), QQ, lex)
                self.names = new
                self.index = {n: i for i, n in enumerate(new)}
        return self.ring

    def small_ring(self, names: tuple[str, ...]) -> PolyRing:
        ring = self._small.get(names)
        if ring is None:
            ring = PolyRing(tuple(Symbol(n) for n in names), QQ, lex)
            self._small[names] = ring
        return ring


_STATE = _RingState()
_STATE.ensure(["_one"])


def _ring() -> PolyRing:
    return _STATE.ring


def _gen(name: str) -> PolyElement:
    ring = _STATE.ensure([name])
    return ring.gens[_STATE.index[name]]


def _to_qq(value: int | Fraction):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ(int(value))


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _support(p: PolyElement) -> set[int]:
    used: set[int] = set()
    for monom in p.itermonoms():
        for i, e in enumerate(monom):
            if e:
                used.add(i)
    return used


def _shift_down(p: PolyElement, monom: tuple[int, ...]) -> PolyElement:
    ring = p.ring
    return ring.from_dict({tuple(a - b for a, b in zip(m, monom)): c for m, c in p.items()})


def _cofactors(p: PolyElement, q: PolyElement) -> tuple[PolyElement, PolyElement, PolyElement]:
    """Return ``(g, p/g, q/g)`` with ``g`` a gcd, using a ring over the occurring generators only."""
    ring = p.ring
    one = ring.one
    if q.is_ground or p.is_ground:
        return one, p, q
    if len(p) == 1 or len(q) == 1:
        nvars = ring.ngens
        low = [min(m[i] for m in list(p.itermonoms()) + list(q.itermonoms())) for i in range(nvars)]
        if not any(low):
            return one, p, q
        low_t = tuple(low)
        g = ring.from_dict({low_t: QQ(1)})
        return g, _shift_down(p, low_t), _shift_down(q, low_t)
    idx = sorted(_support(p) | _support(q))
    names = tuple(_STATE.names[i] if ring is _STATE.ring else str(ring.symbols[i]) for i in idx)
    small = _STATE.small_ring(names)

    def down(f: PolyElement) -> PolyElement:
        return small.from_dict({tuple(m[i] for i in idx): c for m, c in f.items()})

    n = ring.ngens

    def up(f: PolyElement) -> PolyElement:
        out = {}
        for m, c in f.items():
            full = [0] * n
            for j, e in zip(idx, m):
                full[j] = e
            out[tuple(full)] = c
        return ring.from_dict(out)

    g, cp, cq = down(p).cofactors(down(q))
    if g.is_ground:
        return one, p, q
    return up(g), up(cp), up(cq)


def _normalize(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    if not den:
        raise DivisionByZero("denominator is zero")
    if not num:
        return num.ring.zero, num.ring.one
    if den.is_ground:
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
        return num, num.ring.one
    _, num, den = _cofactors(num, den)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


# ---------------------------------------------------------------------------
# Scalar


class Scalar:
    """Immutable reduced fraction of polynomials over QQ.

    The denominator is monic with respect to the ring's lex order, so two
    Scalars are equal exactly when their numerators and denominators agree.
    """

    __slots__ = ("_num", "_den", "_str", "_names")

    def __init__(self, num: PolyElement, den: PolyElement | None = None, *, _reduced: bool = False):
        if den is None:
            den = num.ring.one
        if not _reduced:
            num, den = _normalize(num, den)
        self._num = num
        self._den = den
        self._str: str | None = None
        self._names: frozenset[str] | None = None

    # construction ----------------------------------------------------------

    @classmethod
    def const(cls, value: int | Fraction) -> "Scalar":
        ring = _ring()
        return cls(ring.ground_new(_to_qq(value)), ring.one, _reduced=True)

    @classmethod
    def var(cls, name: str) -> "Scalar":
        g = _gen(name)
        return cls(g, g.ring.one, _reduced=True)

    @classmethod
    def coerce(cls, value: ScalarLike | str) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a scalar")
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Scalar")

    # ring synchronisation --------------------------------------------------

    def _parts(self) -> tuple[PolyElement, PolyElement]:
        ring = _STATE.ring
        if self._num.ring is not ring:
            self._num = self._num.set_ring(ring)
            self._den = self._den.set_ring(ring)
        return self._num, self._den

    # accessors -------------------------------------------------------------

    @property
    def numerator(self) -> "Scalar":
        n, _ = self._parts()
        return Scalar(n, n.ring.one, _reduced=True)

    @property
    def denominator(self) -> "Scalar":
        _, d = self._parts()
        return Scalar(d, d.ring.one, _reduced=True)

    def is_zero(self) -> bool:
        return not self._num

    def is_polynomial(self) -> bool:
        return self._den.is_ground

    def is_constant(self) -> bool:
        return self._num.is_ground and self._den.is_ground

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        n, d = self._parts()
        return _to_fraction(n.LC if n else QQ(0)) / _to_fraction(d.LC)

    def names(self) -> frozenset[str]:
        """Generator names occurring in numerator or denominator."""
        if self._names is None:
            n, d = self._parts()
            idx = _support(n) | _support(d)
            self._names = frozenset(_STATE.names[i] for i in idx)
        return self._names

    def depends_on(self, name: str) -> bool:
        return name in self.names()

    def degree_in(self, name: str) -> int:
        """Degree of the numerator in one generator (the denominator is ignored)."""
        i = _STATE.index.get(name)
        if i is None:
            return 0
        n, _ = self._parts()
        return max((m[i] for m in n.itermonoms()), default=0)

    # arithmetic ------------------------------------------------------------

    def __add__(self, other: ScalarLike) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                other = Scalar.const(other)
            else:
                return NotImplemented
        a, b = self._parts()
        c, d = other._parts()
        if not a:
            return other
        if not c:
            return self
        if b.is_ground and d.is_ground:
            return Scalar(a + c, b, _reduced=True)
        if b == d:
            return Scalar(a + c, b)
        g, b1, d1 = _cofactors(b, d)
        t = a * d1 + c * b1
        if not t:
            return ZERO
        if g.is_ground:
            num, den = t, b * d1
        else:
            _, t1, g1 = _cofactors(t, g)
            num, den = t1, b1 * d1 * g1
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return Scalar(num, den, _reduced=True)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        n, d = self._parts()
        return Scalar(-n, d, _reduced=True)

    def __sub__(self, other: ScalarLike) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                other = Scalar.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return (-self) + other

    def __mul__(self, other: ScalarLike) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                if other == 0:
                    return ZERO
                n, d = self._parts()
                return Scalar(n.mul_ground(_to_qq(other)), d, _reduced=True)
            return NotImplemented
        a, b = self._parts()
        c, d = other._parts()
        if not a or not c:
            return ZERO
        if b.is_ground and d.is_ground:
            return Scalar(a * c, b, _reduced=True)
        # cross-cancel before multiplying
        _, a1, d1 = _cofactors(a, d)
        _, c1, b1 = _cofactors(c, b)
        num, den = a1 * c1, b1 * d1
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return Scalar(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        n, d = self._parts()
        if not n:
            raise DivisionByZero("division by the zero Scalar")
        lc = n.LC
        return Scalar(d.quo_ground(lc), n.quo_ground(lc), _reduced=True)

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                if other == 0:
                    raise DivisionByZero("division by zero")
                return self * (Fraction(1) / Fraction(other))
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: ScalarLike) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "Scalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        n, d = self._parts()
        return Scalar(n**exponent, d**exponent, _reduced=True)

    # comparison ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        a, b = self._parts()
        c, d = other._parts()
        return a == c and b == d

    def __hash__(self) -> int:
        return hash(str(self))

    def __bool__(self) -> bool:
        return bool(self._num)

    def __str__(self) -> str:
        if self._str is None:
            self._str = format_scalar(self)
        return self._str

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    # calculus --------------------------------------------------------------

    def _poly_derivative(self, p: PolyElement, coord: str, steps: list[tuple[int, int]]) -> PolyElement:
        ring = p.ring
        out = ring.zero
        ci = _STATE.index.get(coord)
        if ci is not None:
            out = p.diff(ring.gens[ci])
        for src, dst in steps:
            dp = p.diff(ring.gens[src])
            if dp:
                out += dp * ring.gens[dst]
        return out

    def diff(self, coord: str) -> "Scalar":
        """Total partial derivative in ``coord``, with the chain rule through jets."""
        names = self.names()
        pairs = []
        for name in names:
            nxt = _jet_step(name, coord)
            if nxt is not None:
                pairs.append((name, nxt))
        if pairs:
            _STATE.ensure([nxt for _, nxt in pairs])
        n, d = self._parts()
        if coord not in names and not pairs:
            return ZERO
        steps = [(_STATE.index[a], _STATE.index[b]) for a, b in pairs]
        dn = self._poly_derivative(n, coord, steps)
        if d.is_ground:
            return Scalar(dn, d, _reduced=True)
        dd = self._poly_derivative(d, coord, steps)
        if not dd:
            return Scalar(dn, d)
        return Scalar(dn * d - n * dd, d * d)

    def diff_generator(self, name: str) -> "Scalar":
        """Formal derivative in one generator, ignoring the jet chain rule."""
        i = _STATE.index.get(name)
        if i is None:
            return ZERO
        n, d = self._parts()
        g = n.ring.gens[i]
        dn = n.diff(g)
        if d.is_ground:
            return Scalar(dn, d, _reduced=True)
        return Scalar(dn * d - n * d.diff(g), d * d)

    def subs(self, mapping: Mapping[str, ScalarLike]) -> "Scalar":
        """Simultaneously replace generators by Scalars."""
        mapping = {k: Scalar.coerce(v) for k, v in mapping.items() if self.depends_on(k)}
        if not mapping:
            return self
        n, d = self._parts()
        for v in mapping.values():
            v._parts()
        n, d = self._parts()
        if all(v.is_polynomial() for v in mapping.values()):
            ring = n.ring
            pairs = [(ring.gens[_STATE.index[k]], v._parts()[0]) for k, v in mapping.items()]
            nn = n.compose(pairs)
            dd = d.compose(pairs) if not d.is_ground else d
            return Scalar(nn, dd)
        return _subs_rational(n, mapping) / _subs_rational(d, mapping)


def _subs_rational(p: PolyElement, mapping: Mapping[str, Scalar]) -> Scalar:
    ring = p.ring
    idx = {_STATE.index[k]: v for k, v in mapping.items()}
    keep_ring_part: dict[tuple[int, ...], list] = {}
    # group terms by the exponents of substituted generators
    for m, c in p.items():
        key = tuple(m[i] for i in sorted(idx))
        rest = tuple(0 if i in idx else e for i, e in enumerate(m))
        keep_ring_part.setdefault(key, []).append((rest, c))
    order = sorted(idx)
    total = ZERO
    powers: dict[tuple[int, int], Scalar] = {}
    for key, terms in keep_ring_part.items():
        factor = ONE
        for i, e in zip(order, key):
            if e:
                pw = powers.get((i, e))
                if pw is None:
                    pw = idx[i] ** e
                    powers[(i, e)] = pw
                factor = factor * pw
        rest = Scalar(ring.from_dict(dict(terms)), ring.one, _reduced=True)
        total = total + rest * factor
    return total


ZERO = Scalar.const(0)
ONE = Scalar.const(1)


def scalar(value: ScalarLike | str) -> Scalar:
    """Coerce an int, Fraction, literal string or Scalar to a Scalar."""
    return Scalar.coerce(value)


# ---------------------------------------------------------------------------
# calculus front ends


def partial_derivative(f: Scalar, coord: str, coordinates: Iterable[str] | None = None) -> Scalar:
    """Partial derivative of ``f`` in the chart coordinate ``coord``.

    ``coordinates`` is the chart's coordinate list; when omitted any plain
    (non-jet) name is accepted.
    """
    if coordinates is not None:
        if coord not in tuple(coordinates):
            raise UnknownCoordinate(f"{coord!r} is not a chart coordinate")
    elif not _IDENT.fullmatch(coord) or coord in _jets:
        raise UnknownCoordinate(f"{coord!r} is not a coordinate name")
    return f.diff(coord)


def _jet_short_name(name: str) -> str | None:
    info = _jets.get(name)
    if info is None or len(info.args) != 1:
        return None
    return info.symbol + "'" * info.orders[0]


def evaluate(
    f: Scalar,
    point: Mapping[str, int | Fraction],
    jet_values: Mapping[str, int | Fraction] | None = None,
) -> Fraction:
    """Exact value of ``f`` at a rational point.

    Jets may be keyed by their full name (``"m'(x6)"``) or by the short form
    (``"m'"``); plain formal constants may appear in either map.
    """
    jet_values = dict(jet_values or {})
    values: dict[int, Fraction] = {}
    missing = []
    for name in sorted(f.names(), key=name_key):
        if name in point:
            val = point[name]
        elif name in jet_values:
            val = jet_values[name]
        else:
            short = _jet_short_name(name)
            if short is not None and short in jet_values:
                val = jet_values[short]
            else:
                missing.append(name)
                continue
        values[_STATE.index[name]] = Fraction(val)
    if missing:
        raise IncompleteValuation("no value for " + ", ".join(missing))
    n, d = f._parts()
    den = _eval_poly(d, values)
    if den == 0:
        raise PoleAtPoint(f"denominator {format_poly(d)} vanishes at the point")
    return _eval_poly(n, values) / den


def _eval_poly(p: PolyElement, values: Mapping[int, Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        term = _to_fraction(c)
        for i, e in enumerate(m):
            if e:
                term *= values[i] ** e
        total += term
    return total


# ---------------------------------------------------------------------------
# printing


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: PolyElement) -> str:
    """Render a polynomial with graded-lex term order over the global name order."""
    if not p:
        return "0"
    names = [str(s) for s in p.ring.symbols]
    terms = sorted(p.items(), key=lambda mc: (-sum(mc[0]), tuple(-e for e in mc[0])))
    out: list[str] = []
    for k, (m, c) in enumerate(terms):
        c = _to_fraction(c)
        neg = c < 0
        c = -c if neg else c
        factors = [names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e]
        if not factors:
            body = _format_coeff(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(c) + "*" + "*".join(factors)
        if k == 0:
            out.append("-" + body if neg else body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def format_scalar(f: Scalar) -> str:
    n, d = f._parts()
    num = format_poly(n)
    if d.is_ground:
        return num
    den = format_poly(d)
    if len(n) > 1 or _to_fraction(n.LC).denominator != 1:
        num = f"({num})"
    single_power = len(d) == 1 and d.LC == 1 and sum(1 for e in d.LM if e) == 1
    if not single_power:
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+)"
    r"|(?P<jet>[A-Za-z_][A-Za-z0-9_]*'*\(\s*[A-Za-z_][A-Za-z0-9_]*\s*\))"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_JET_PARTS = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)('*)\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\)")


class _Parser:
    def __init__(self, text: str, coordinates: tuple[str, ...] | None, symbols: Mapping[str, str] | None,
                 constants: tuple[str, ...]):
        self.text = text
        self.coordinates = coordinates
        self.symbols = symbols
        self.constants = constants
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                stripped = len(text[pos:]) - len(text[pos:].lstrip())
                raise ScalarParseError("unexpected character", text, pos + stripped)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ScalarParseError("unexpected end of input", self.text, len(self.text))
        self.i += 1
        return tok

    def parse(self) -> Scalar:
        if not self.tokens:
            raise ScalarParseError("empty expression", self.text, 0)
        value = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ScalarParseError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return value

    def expr(self) -> Scalar:
        value = self.term()
        while (tok := self.peek()) is not None and tok[0] == "op" and tok[1] in "+-":
            self.take()
            rhs = self.term()
            value = value + rhs if tok[1] == "+" else value - rhs
        return value

    def term(self) -> Scalar:
        value = self.unary()
        while (tok := self.peek()) is not None and tok[0] == "op" and tok[1] in "*/":
            self.take()
            rhs = self.unary()
            if tok[1] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZero(f"division by zero at offset {tok[2]} in {self.text!r}")
                value = value / rhs
        return value

    def unary(self) -> Scalar:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.take()
            sign = 1
            t = self.take()
            if t[0] == "op" and t[1] == "-":
                sign = -1
                t = self.take()
            if t[0] != "num":
                raise ScalarParseError("exponent must be an integer", self.text, t[2])
            exp = sign * int(t[1])
            if exp < 0 and base.is_zero():
                raise DivisionByZero(f"zero to a negative power in {self.text!r}")
            return base**exp
        return base

    def atom(self) -> Scalar:
        kind, text, pos = self.take()
        if kind == "num":
            return Scalar.const(int(text))
        if kind == "ident":
            if self.coordinates is not None and text not in self.coordinates and text not in self.constants:
                raise ScalarParseError(f"unknown name {text!r}", self.text, pos)
            return Scalar.var(text)
        if kind == "jet":
            sym, primes, arg = _JET_PARTS.fullmatch(text).groups()
            if self.symbols is not None:
                if sym not in self.symbols:
                    raise ScalarParseError(f"undeclared function symbol {sym!r}", self.text, pos)
                if self.symbols[sym] != arg:
                    raise ScalarParseError(
                        f"{sym} is declared with argument {self.symbols[sym]!r}, not {arg!r}", self.text, pos
                    )
            if _functions.get(sym) != (arg,):
                declare_symbol(sym, arg)
            return Scalar.var(jet_name(sym, len(primes)))
        if text == "(":
            value = self.expr()
            close = self.take()
            if close[1] != ")":
                raise ScalarParseError("expected ')'", self.text, close[2])
            return value
        raise ScalarParseError(f"unexpected {text!r}", self.text, pos)


def parse_scalar(
    text: str,
    coordinates: Iterable[str] | None = None,
    symbols: Mapping[str, str] | None = None,
    constants: Iterable[str] = (),
) -> Scalar:
    """Parse a scalar literal.

    When ``coordinates`` is given, plain identifiers must be coordinates or
    listed ``constants``.  When ``symbols`` (function name -> argument) is
    given, jets must use a declared function with its declared argument.
    """
    coords = tuple(coordinates) if coordinates is not None else None
    return _Parser(text, coords, symbols, tuple(constants)).parse()
