"""Normed sequence and function spaces with their classical fixed-point-free isometries.

Three point representations are provided:

* :class:`FiniteSupportVector` -- a finitely supported sequence indexed by the
  integers, stored as a dense window ``values`` starting at ``offset``.
* :class:`EventuallyConstantSeq` -- a sequence indexed by the naturals that is
  eventually equal to ``tail`` (its limit).
* :class:`DyadicStepFunction` -- a step function on ``[0, 1)`` with ``2**level``
  pieces and exact dyadic rational values.

Values may be floats or exact ``Fraction`` objects (stored in object arrays);
all norms and maps work on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import (
    DomainError,
    InvalidParameter,
    Isometry,
    MetricSpace,
    ResourceError,
    check_t,
)

MAX_DYADIC_LEVEL = 24


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormTag:
    """Which norm a sequence space carries.

    ``basso`` is the strictly convex renorming ``sqrt(|x|_1**2 + |x|_2**2)`` of
    ``l1``; it is equivalent to the ``l1`` norm and shift invariant.
    """

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "l2", "linf", "lp", "basso"):
            raise InvalidParameter(f"unknown norm {self.kind!r}")
        if self.kind == "lp" and (self.p is None or not self.p >= 1):
            raise InvalidParameter(f"lp norm needs p >= 1, got {self.p!r}")

    @classmethod
    def parse(cls, tag) -> "NormTag":
        if isinstance(tag, NormTag):
            return tag
        if isinstance(tag, (int, float)):
            p = float(tag)
            if p == 1:
                return L1
            if p == 2:
                return L2
            if math.isinf(p):
                return LINF
            return cls("lp", p)
        tag = str(tag)
        if tag.startswith("l") and tag[1:] not in ("1", "2", "inf"):
            try:
                return cls.parse(float(tag[1:]))
            except ValueError:
                pass
        return cls(tag)

    def __str__(self):
        return f"l{self.p:g}" if self.kind == "lp" else self.kind


L1 = NormTag("l1")
L2 = NormTag("l2")
LINF = NormTag("linf")
BASSO = NormTag("basso")


def lp(p: float) -> NormTag:
    return NormTag.parse(p) if p in (1, 2) else NormTag("lp", float(p))


def _as_number(v):
    if isinstance(v, Fraction):
        return v
    return float(v)


def norm_of(values: np.ndarray, tag: NormTag):
    """Norm of a dense coefficient array (zeros elsewhere)."""
    a = np.abs(values)
    if a.size == 0:
        return 0.0
    exact = a.dtype == object
    if tag.kind == "l1":
        return _as_number(a.sum())
    if tag.kind == "linf":
        return _as_number(a.max())
    if tag.kind == "l2":
        return math.sqrt(a.dot(a)) if exact else float(np.linalg.norm(a))
    if tag.kind == "lp":
        p = tag.p
        if exact:
            a = a.astype(float)
        m = a.max()
        if m == 0:
            return 0.0
        return float(m * np.sum((a / m) ** p) ** (1.0 / p))
    n1 = float(a.sum())
    n2 = float(np.linalg.norm(a.astype(float)))
    return math.hypot(n1, n2)


# ---------------------------------------------------------------------------
# finitely supported sequences on Z


def _coerce_values(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.dtype == object:
        return arr
    if arr.dtype.kind in "biu":
        return arr.astype(float)
    if arr.dtype.kind == "f":
        return arr.astype(float, copy=False)
    raise TypeError(f"unsupported coefficient dtype {arr.dtype}")


def _common_dtype(a: np.ndarray, b: np.ndarray):
    return object if (a.dtype == object or b.dtype == object) else float


class FiniteSupportVector:
    """Finitely supported real sequence on the integers.

    The canonical form trims zeros at both ends of the stored window, so two
    vectors are equal iff their offsets and windows agree.  Instances are
    immutable; derived quantities (norms, running maxima) are cached.
    """

    __slots__ = ("offset", "values", "_cache")

    def __init__(self, offset: int = 0, values=(), _owned: bool = False):
        vals = _coerce_values(values)
        if vals.size and (vals[0] == 0 or vals[-1] == 0):
            nz = np.flatnonzero(vals != 0)
            if nz.size == 0:
                offset, vals = 0, vals[:0]
            else:
                offset = offset + int(nz[0])
                vals = vals[nz[0] : nz[-1] + 1]
        if vals.flags.writeable and not _owned:
            vals = vals.copy()
        vals.flags.writeable = False
        self.offset = int(offset)
        self.values = vals
        self._cache = {}

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "FiniteSupportVector":
        return cls(0, np.zeros(0))

    @classmethod
    def unit(cls, i: int, value=1.0) -> "FiniteSupportVector":
        return cls(i, np.array([value], dtype=object if isinstance(value, Fraction) else float))

    @classmethod
    def from_dict(cls, entries: dict) -> "FiniteSupportVector":
        if not entries:
            return cls.zero()
        lo, hi = min(entries), max(entries)
        exact = any(isinstance(v, Fraction) for v in entries.values())
        vals = np.zeros(hi - lo + 1, dtype=object if exact else float)
        if exact:
            vals[:] = 0
        for i, v in entries.items():
            vals[i - lo] = v
        return cls(lo, vals)

    @classmethod
    def from_json(cls, data: dict) -> "FiniteSupportVector":
        return cls.from_dict(
            {int(i): _parse_number(v) for i, v in zip(data["indices"], data["values"])}
        )

    # inspection ---------------------------------------------------------
    @property
    def start(self) -> int:
        return self.offset

    @property
    def stop(self) -> int:
        return self.offset + self.values.size

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    def support(self) -> np.ndarray:
        return self.offset + np.flatnonzero(self.values != 0)

    def __getitem__(self, i: int):
        j = i - self.offset
        if 0 <= j < self.values.size:
            return self.values[j]
        return 0.0

    def dense(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients on ``[lo, hi)`` padded with zeros."""
        out = np.zeros(max(hi - lo, 0), dtype=self.values.dtype)
        if self.values.dtype == object:
            out[:] = 0
        a, b = max(lo, self.start), min(hi, self.stop)
        if a < b:
            out[a - lo : b - lo] = self.values[a - self.offset : b - self.offset]
        return out

    def items(self):
        for i in self.support():
            yield int(i), self.values[i - self.offset]

    def norm(self, tag=L1):
        tag = NormTag.parse(tag)
        key = ("norm", tag)
        if key not in self._cache:
            self._cache[key] = norm_of(self.values, tag)
        return self._cache[key]

    def to_json(self) -> dict:
        idx = [int(i) for i in self.support()]
        return {"indices": idx, "values": [_format_number(self[i]) for i in idx]}

    def __repr__(self):
        if self.size <= 8:
            body = ", ".join(f"{i}: {v}" for i, v in self.items())
            return f"FiniteSupportVector({{{body}}})"
        return f"FiniteSupportVector(window=[{self.start}, {self.stop}), nnz~{self.size})"

    # arithmetic ---------------------------------------------------------
    def _combine(self, other: "FiniteSupportVector", op) -> "FiniteSupportVector":
        if not isinstance(other, FiniteSupportVector):
            return NotImplemented
        if other.size == 0:
            return self
        if self.size == 0:
            return other if op is np.add else -other
        lo, hi = min(self.start, other.start), max(self.stop, other.stop)
        out = self.dense(lo, hi)
        if out.dtype != other.values.dtype:
            out = out.astype(object)
        a = other.start - lo
        view = out[a : a + other.size]
        op(view, other.values, out=view)
        return FiniteSupportVector(lo, out, _owned=True)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        return FiniteSupportVector(self.offset, -self.values, _owned=True)

    def __mul__(self, c):
        if isinstance(c, (FiniteSupportVector, np.ndarray)):
            return NotImplemented
        if c == 0:
            return FiniteSupportVector.zero()
        if isinstance(c, Fraction) and not self.exact:
            c = float(c)
        return FiniteSupportVector(self.offset, self.values * c, _owned=True)

    __rmul__ = __mul__

    def shifted(self, k: int) -> "FiniteSupportVector":
        """The sequence ``i -> x[i - k]`` (right shift by ``k``)."""
        out = FiniteSupportVector.__new__(FiniteSupportVector)
        out.offset, out.values, out._cache = self.offset + int(k), self.values, dict(self._cache)
        return out

    def __eq__(self, other):
        if not isinstance(other, FiniteSupportVector):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.values, other.values)

    __hash__ = None

    # cached running extrema of |x|, used by the sup-norm functional
    def _abs_max_tables(self):
        if "absmax" not in self._cache:
            a = np.abs(self.values.astype(float))
            self._cache["absmax"] = (np.maximum.accumulate(a), np.maximum.accumulate(a[::-1])[::-1])
        return self._cache["absmax"]

    def abs_max_outside(self, lo: int, hi: int) -> float:
        """``max |x_i|`` over indices outside ``[lo, hi)`` (0 if none)."""
        if self.size == 0:
            return 0.0
        pre, suf = self._abs_max_tables()
        m = 0.0
        j = lo - self.offset
        if j > 0:
            m = max(m, pre[min(j, self.size) - 1])
        j = hi - self.offset
        if j < self.size:
            m = max(m, suf[max(j, 0)])
        return float(m)

    def power_mass_outside(self, lo: int, hi: int, p: float) -> float:
        """``sum |x_i|**p`` over indices outside ``[lo, hi)``, from cached running sums."""
        if self.size == 0:
            return 0.0
        key = ("mass", p)
        if key not in self._cache:
            a = np.abs(self.values.astype(float)) ** p
            # both tables are summed away from the window, so nothing cancels
            self._cache[key] = (np.cumsum(a), np.cumsum(a[::-1])[::-1])
        pre, suf = self._cache[key]
        m = 0.0
        j = lo - self.offset
        if j > 0:
            m += pre[min(j, self.size) - 1]
        j = hi - self.offset
        if j < self.size:
            m += suf[max(j, 0)]
        return float(m)


def _parse_number(v):
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    if isinstance(v, dict):
        return Fraction(v["num"], v["den"])
    return float(v)


def _format_number(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else float(v)
    return float(v)


# ---------------------------------------------------------------------------
# eventually constant sequences on N


class EventuallyConstantSeq:
    """Sequence ``(prefix[0], prefix[1], ..., tail, tail, ...)`` on the naturals.

    Canonical form: the prefix never ends with the tail value.  ``lim`` is the
    tail, which is where the Banach limit of the Prus map is evaluated.
    """

    __slots__ = ("prefix", "tail", "_cache")

    def __init__(self, prefix=(), tail=0.0):
        vals = _coerce_values(prefix)
        exact = vals.dtype == object or isinstance(tail, Fraction)
        if exact and vals.dtype != object:
            vals = vals.astype(object)
        if not exact:
            tail = float(tail)
        neq = np.flatnonzero(vals != tail)
        vals = vals[: neq[-1] + 1] if neq.size else vals[:0]
        if vals.flags.writeable:
            vals = vals.copy()
        vals.flags.writeable = False
        self.prefix = vals
        self.tail = tail
        self._cache = {}

    @classmethod
    def from_json(cls, data: dict) -> "EventuallyConstantSeq":
        return cls([_parse_number(v) for v in data["prefix"]], _parse_number(data["tail"]))

    @property
    def lim(self):
        return self.tail

    @property
    def exact(self) -> bool:
        return self.prefix.dtype == object

    def __len__(self):
        return self.prefix.size

    def __getitem__(self, i: int):
        return self.prefix[i] if i < self.prefix.size else self.tail

    def padded(self, n: int) -> np.ndarray:
        if n <= self.prefix.size:
            return self.prefix[:n]
        out = np.empty(n, dtype=self.prefix.dtype)
        out[: self.prefix.size] = self.prefix
        out[self.prefix.size :] = self.tail
        return out

    def sup_norm(self):
        key = "sup"
        if key not in self._cache:
            m = abs(self.tail)
            if self.prefix.size:
                m = max(m, np.abs(self.prefix).max())
            self._cache[key] = _as_number(m)
        return self._cache[key]

    def norm(self, tag=LINF):
        if NormTag.parse(tag) != LINF:
            raise InvalidParameter("eventually constant sequences only carry the sup norm")
        return self.sup_norm()

    def _combine(self, other, op):
        if not isinstance(other, EventuallyConstantSeq):
            return NotImplemented
        n = max(self.prefix.size, other.prefix.size)
        return EventuallyConstantSeq(op(self.padded(n), other.padded(n)), op(self.tail, other.tail))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return EventuallyConstantSeq(-self.prefix, -self.tail)

    def __mul__(self, c):
        if isinstance(c, EventuallyConstantSeq):
            return NotImplemented
        if isinstance(c, Fraction) and not self.exact:
            c = float(c)
        return EventuallyConstantSeq(self.prefix * c, self.tail * c)

    __rmul__ = __mul__

    def prepend(self, head) -> "EventuallyConstantSeq":
        head = _coerce_values(head)
        if self.exact and head.dtype != object:
            head = head.astype(object)
        return EventuallyConstantSeq(np.concatenate([head, self.prefix]), self.tail)

    def __eq__(self, other):
        if not isinstance(other, EventuallyConstantSeq):
            return NotImplemented
        return self.tail == other.tail and np.array_equal(self.prefix, other.prefix)

    __hash__ = None

    def to_json(self) -> dict:
        return {"prefix": [_format_number(v) for v in self.prefix], "tail": _format_number(self.tail)}

    def __repr__(self):
        head = ", ".join(str(v) for v in self.prefix[:6])
        more = ", ..." if self.prefix.size > 6 else ""
        return f"EventuallyConstantSeq([{head}{more}], tail={self.tail})"

    def _suffix_extrema(self):
        if "suffix" not in self._cache:
            a = self.prefix.astype(float)
            self._cache["suffix"] = (
                np.minimum.accumulate(a[::-1])[::-1],
                np.maximum.accumulate(a[::-1])[::-1],
            )
        return self._cache["suffix"]


# ---------------------------------------------------------------------------
# dyadic step functions on [0, 1)


class DyadicStepFunction:
    """Step function equal to ``numerators[j] / 2**denom_pow`` on ``[j 2^-level, (j+1) 2^-level)``.

    Numerators are Python integers, so every operation below is exact.
    """

    __slots__ = ("level", "numerators", "denom_pow")

    def __init__(self, level: int, numerators, denom_pow: int = 0):
        if level < 0 or denom_pow < 0:
            raise InvalidParameter("level and denom_pow must be nonnegative")
        if level > MAX_DYADIC_LEVEL:
            raise ResourceError(f"dyadic level {level} exceeds the cap {MAX_DYADIC_LEVEL}")
        nums = np.empty(2**level, dtype=object)
        src = list(numerators)
        if len(src) != 2**level:
            raise InvalidParameter(f"expected {2 ** level} numerators, got {len(src)}")
        for j, v in enumerate(src):
            if int(v) != v:
                raise InvalidParameter("numerators must be integers")
            nums[j] = int(v)
        nums.flags.writeable = False
        self.level, self.numerators, self.denom_pow = level, nums, denom_pow

    @classmethod
    def constant(cls, value=1) -> "DyadicStepFunction":
        return cls.from_values(0, [Fraction(value)])

    @classmethod
    def from_values(cls, level: int, values: Sequence) -> "DyadicStepFunction":
        fr = [Fraction(v) for v in values]
        m = 0
        for v in fr:
            den = v.denominator
            if den & (den - 1):
                raise InvalidParameter(f"value {v} is not a dyadic rational")
            m = max(m, den.bit_length() - 1)
        return cls(level, [int(v * 2**m) for v in fr], m)

    @classmethod
    def from_json(cls, data: dict) -> "DyadicStepFunction":
        return cls(data["level"], data["numerators"], data["denom_pow"])

    def to_json(self) -> dict:
        return {"level": self.level, "numerators": [int(v) for v in self.numerators],
                "denom_pow": self.denom_pow}

    def values(self) -> list:
        d = 2**self.denom_pow
        return [Fraction(int(v), d) for v in self.numerators]

    def refined(self, level: int, denom_pow: int | None = None) -> "DyadicStepFunction":
        if level < self.level:
            raise InvalidParameter("cannot coarsen a step function")
        m = self.denom_pow if denom_pow is None else denom_pow
        if m < self.denom_pow:
            raise InvalidParameter("cannot lower the denominator")
        factor = 2 ** (m - self.denom_pow)
        nums = np.repeat(self.numerators, 2 ** (level - self.level)) * factor
        return DyadicStepFunction(level, nums, m)

    def _aligned(self, other):
        lev = max(self.level, other.level)
        m = max(self.denom_pow, other.denom_pow)
        return self.refined(lev, m), other.refined(lev, m)

    def __add__(self, other):
        a, b = self._aligned(other)
        return DyadicStepFunction(a.level, a.numerators + b.numerators, a.denom_pow)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return DyadicStepFunction(a.level, a.numerators - b.numerators, a.denom_pow)

    def __mul__(self, c):
        c = Fraction(c)
        den = c.denominator
        if den & (den - 1):
            raise InvalidParameter(f"scalar {c} is not a dyadic rational")
        k = den.bit_length() - 1
        return DyadicStepFunction(self.level, self.numerators * c.numerator, self.denom_pow + k)

    __rmul__ = __mul__

    def integral(self) -> Fraction:
        return Fraction(int(sum(self.numerators)), 2 ** (self.denom_pow + self.level))

    def l1_norm(self) -> Fraction:
        return Fraction(int(sum(abs(v) for v in self.numerators)), 2 ** (self.denom_pow + self.level))

    def in_alspach_set(self) -> bool:
        """Values in ``[0, 2]`` and integral exactly 1."""
        top = 2 * 2**self.denom_pow
        ok = all(0 <= v <= top for v in self.numerators)
        return ok and self.integral() == 1

    def __call__(self, t: float) -> Fraction:
        j = min(int(t * 2**self.level), 2**self.level - 1)
        return Fraction(int(self.numerators[j]), 2**self.denom_pow)

    def __eq__(self, other):
        if not isinstance(other, DyadicStepFunction):
            return NotImplemented
        a, b = self._aligned(other)
        return all(x == y for x, y in zip(a.numerators, b.numerators))

    __hash__ = None

    def __repr__(self):
        return f"DyadicStepFunction(level={self.level}, values={[str(v) for v in self.values()[:8]]})"


# ---------------------------------------------------------------------------
# spaces


def norm_distance(x, y, tag=L1):
    """``||x - y||`` under ``tag`` for two sequences of the same family."""
    tag = NormTag.parse(tag)
    if isinstance(x, FiniteSupportVector) and isinstance(y, FiniteSupportVector):
        return (x - y).norm(tag)
    if isinstance(x, EventuallyConstantSeq) and isinstance(y, EventuallyConstantSeq):
        return (x - y).norm(tag)
    if isinstance(x, DyadicStepFunction) and isinstance(y, DyadicStepFunction):
        if tag != L1:
            raise InvalidParameter("step functions carry the L1 norm")
        return (x - y).l1_norm()
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return norm_of(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), tag)
    raise TypeError(f"incompatible points {type(x).__name__} and {type(y).__name__}")


def segment_point(x, y, t):
    """``(1 - t) x + t y``; the linear bicombing of a normed space."""
    check_t(t)
    if t == 0:
        return x
    if t == 1:
        return y
    return x + (y - x) * t


@dataclass(frozen=True)
class SequenceSpace(MetricSpace):
    """Finitely supported sequences on Z with an lp or Basso norm.

    ``natural=True`` restricts to sequences supported in the nonnegative
    indices; ``radius`` restricts to a closed ball around 0 (the Kakutani
    domain is ``SequenceSpace(LINF, radius=1, natural=True)``).
    """

    norm: NormTag = L1
    base_point: FiniteSupportVector = field(default_factory=FiniteSupportVector.zero)
    natural: bool = False
    radius: float | None = None

    @property
    def name(self):
        return f"seq-{self.norm}"

    def validate(self, x):
        if not isinstance(x, FiniteSupportVector):
            raise TypeError(f"{self.name} expects a FiniteSupportVector, got {type(x).__name__}")
        if self.natural and x.size and x.start < 0:
            raise DomainError("point has support at negative indices")
        if self.radius is not None and x.norm(self.norm) > self.radius * (1 + 1e-12):
            raise DomainError(f"point outside the ball of radius {self.radius}")
        return x

    def distance(self, x, y) -> float:
        return (x - y).norm(self.norm)

    def bicombing(self, x, y, t):
        return segment_point(x, y, t)

    def horo(self, y, x) -> float:
        if y.exact or x.exact or self.base_point.exact:
            return super().horo(y, x)
        if self.base_point.size:
            return self._shifted_norm(y, x) - self._shifted_norm(y, self.base_point)
        return self._shifted_norm(y, x)

    def _shifted_norm(self, y, x) -> float:
        """``||x - y|| - ||y||``, touching only the window of ``x`` plus cached norms of ``y``."""
        if x.size == 0:
            return 0.0
        lo, hi = x.start, x.stop
        xs, ys = x.values, y.dense(lo, hi)
        kind = self.norm.kind
        if kind == "l1":
            return float(np.sum(np.abs(xs - ys) - np.abs(ys)))
        if kind == "linf":
            inside = float(np.abs(xs - ys).max())
            return max(inside, y.abs_max_outside(lo, hi)) - float(y.norm(LINF))
        diff = np.abs(xs - ys)
        if kind == "basso":
            n1 = float(diff.sum()) + y.power_mass_outside(lo, hi, 1.0)
            n2 = float(np.sum(diff**2)) + y.power_mass_outside(lo, hi, 2.0)
            return math.sqrt(n1 * n1 + n2) - float(y.norm(BASSO))
        p = 2.0 if kind == "l2" else self.norm.p
        inside = float(np.sum(diff**p)) + y.power_mass_outside(lo, hi, p)
        return inside ** (1.0 / p) - float(y.norm(self.norm))


@dataclass(frozen=True)
class EventuallyConstantSpace(MetricSpace):
    """Eventually constant sequences on N with the sup norm (a subspace of l-infinity)."""

    base_point: EventuallyConstantSeq = field(default_factory=EventuallyConstantSeq)
    name = "ecs-linf"

    def validate(self, x):
        if not isinstance(x, EventuallyConstantSeq):
            raise TypeError(f"{self.name} expects an EventuallyConstantSeq, got {type(x).__name__}")
        return x

    def distance(self, x, y) -> float:
        return (x - y).sup_norm()

    def bicombing(self, x, y, t):
        return segment_point(x, y, t)

    def horo(self, y, x) -> float:
        x0 = self.base_point
        if y.exact or x.exact or x0.exact or len(y) <= max(len(x), len(x0)):
            return super().horo(y, x)
        return self._shifted_norm(y, x) - self._shifted_norm(y, x0)

    @staticmethod
    def _shifted_norm(y, x) -> float:
        """``||x - y|| - ||y||`` for ``len(y) > len(x)``, using cached suffix extrema of ``y``."""
        m = len(x)
        inside = float(np.abs(x.prefix - y.prefix[:m]).max()) if m else 0.0
        c = float(x.tail)
        smin, smax = y._suffix_extrema()
        beyond = max(c - smin[m], smax[m] - c, abs(c - float(y.tail)))
        return max(inside, beyond) - float(y.sup_norm())


@dataclass(frozen=True)
class DyadicL1Space(MetricSpace):
    """Dyadic step functions in L1[0, 1] with exact distances.

    The default base point is the constant function 1, which lies in the
    Alspach set of functions with values in [0, 2] and integral 1.
    """

    base_point: DyadicStepFunction = field(default_factory=DyadicStepFunction.constant)
    name = "dyadic-L1"

    def validate(self, x):
        if not isinstance(x, DyadicStepFunction):
            raise TypeError(f"{self.name} expects a DyadicStepFunction, got {type(x).__name__}")
        return x

    def distance(self, x, y) -> Fraction:
        return (x - y).l1_norm()

    def bicombing(self, x, y, t):
        check_t(t)
        t = Fraction(t)
        return x * (1 - t) + y * t


@dataclass(frozen=True)
class VectorSpace(MetricSpace):
    """R^n with an lp norm or any callable norm, points as numpy arrays."""

    dim: int = 1
    norm: NormTag | Callable = L2
    base_point: np.ndarray | None = None

    def __post_init__(self):
        if self.base_point is None:
            object.__setattr__(self, "base_point", np.zeros(self.dim))
        if not callable(self.norm):
            object.__setattr__(self, "norm", NormTag.parse(self.norm))

    @property
    def name(self):
        tag = self.norm if isinstance(self.norm, NormTag) else "custom"
        return f"R{self.dim}-{tag}"

    def validate(self, x):
        arr = np.asarray(x, dtype=float).reshape(-1)
        if arr.shape != (self.dim,):
            raise TypeError(f"{self.name} expects vectors of length {self.dim}, got shape {arr.shape}")
        return arr

    def vector_norm(self, v) -> float:
        if isinstance(self.norm, NormTag):
            return float(norm_of(np.asarray(v, dtype=float), self.norm))
        return float(self.norm(np.asarray(v, dtype=float)))

    def distance(self, x, y) -> float:
        return self.vector_norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def bicombing(self, x, y, t):
        check_t(t)
        return (1 - t) * np.asarray(x, dtype=float) + t * np.asarray(y, dtype=float)


# ---------------------------------------------------------------------------
# maps


def _e0(exact=False):
    return FiniteSupportVector.unit(0, Fraction(1) if exact else 1.0)


def insert_shift_map(name="insert-shift") -> Isometry:
    """``(x_0, x_1, ...) -> (1, x_0, x_1, ...)`` on sequences supported in N."""

    def forward(x):
        if x.size and x.start < 0:
            raise DomainError("insert-shift acts on sequences supported in N")
        return _e0(x.exact) + x.shifted(1)

    return Isometry(name, forward, linear_power=lambda n, v: v.shifted(n))


def kakutani_map() -> Isometry:
    """Kakutani's fixed-point-free isometry of the unit ball of c0."""

    def forward(x):
        if x.size and x.start < 0:
            raise DomainError("Kakutani's map acts on sequences supported in N")
        if x.norm(LINF) > 1 + 1e-12:
            raise DomainError("Kakutani's map is defined on the closed unit ball of c0")
        return _e0(x.exact) + x.shifted(1)

    return Isometry("kakutani", forward, linear_power=lambda n, v: v.shifted(n))


def shift_map(k: int = 1) -> Isometry:
    """Bilateral shift ``(Tx)_i = x_{i-k}`` on sequences over Z."""
    return Isometry(
        "shift" if k == 1 else f"shift{k}",
        lambda x: x.shifted(k),
        inverse=lambda x: x.shifted(-k),
        params={"k": k},
        linear_power=lambda n, v: v.shifted(k * n),
    )


def prus_map() -> Isometry:
    """``(y_n) -> (1 + lim y_n, y_0, y_1, ...)`` on eventually constant sequences."""

    def forward(y):
        one = Fraction(1) if y.exact else 1.0
        return y.prepend([one + y.tail])

    def power(n, v):
        return v.prepend(np.full(n, v.tail, dtype=object if v.exact else float))

    return Isometry("prus", forward, linear_power=power)


def alspach_map() -> Isometry:
    """Alspach's isometry of the set of [0, 2]-valued functions of integral 1.

    ``Tf(t) = min(2, 2 f(2t))`` on the left half and ``max(0, 2 f(2t-1) - 2)``
    on the right half; on step functions it raises the level by one.
    """

    def forward(f):
        if f.level + 1 > MAX_DYADIC_LEVEL:
            raise ResourceError(f"Alspach image would exceed dyadic level {MAX_DYADIC_LEVEL}")
        two = 2 * 2**f.denom_pow
        left = [min(two, 2 * v) for v in f.numerators]
        right = [max(0, 2 * v - two) for v in f.numerators]
        return DyadicStepFunction(f.level + 1, left + right, f.denom_pow)

    return Isometry("alspach", forward)


def linear_map(U, name="linear") -> Isometry:
    """``x -> U x`` on R^n."""
    U = np.asarray(U, dtype=float)
    inverse = None
    if abs(np.linalg.det(U)) > 1e-12:
        Uinv = np.linalg.inv(U)
        inverse = lambda x: Uinv @ np.asarray(x, dtype=float)  # noqa: E731
    return Isometry(
        name,
        lambda x: U @ np.asarray(x, dtype=float),
        inverse=inverse,
        params={"U": U.tolist()},
        linear_power=lambda n, v: np.linalg.matrix_power(U, n) @ v,
    )


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def affine_map(U: Isometry, v, name: str | None = None) -> Isometry:
    """``x -> U(x) + v`` for a linear map ``U`` given as an :class:`Isometry`."""
    inverse = None
    if U.has_inverse:
        inverse = lambda x: U.inv(x - v)  # noqa: E731
    return Isometry(
        name or f"{U.name}+v",
        lambda x: U(x) + v,
        inverse=inverse,
        params=dict(U.params, v=v),
        linear_power=U.linear_power,
        isometric=U.isometric,
    )


def translation_map(a=1.0, dim: int = 1) -> Isometry:
    """``x -> x + a`` on R^dim."""
    a = np.broadcast_to(np.asarray(a, dtype=float), (dim,)).copy()
    ident = Isometry("identity", lambda x: np.asarray(x, dtype=float), inverse=lambda x: x,
                     linear_power=lambda n, v: v)
    return affine_map(ident, a, name="translation")


def identity_map() -> Isometry:
    return Isometry("identity", lambda x: x, inverse=lambda x: x, linear_power=lambda n, v: v)


def apply_map(T: Isometry, x):
    """Apply a registry map, raising ``DomainError`` outside its domain."""
    return T(x)


# ---------------------------------------------------------------------------
# ramps and closed-form functionals


def kakutani_ramp(N: int, exact=True) -> FiniteSupportVector:
    """``x_k = max(0, 1 - k/N)``; its Kakutani (or insert-shift) displacement is ``1/N``."""
    vals = [Fraction(N - k, N) if exact else 1 - k / N for k in range(N)]
    return FiniteSupportVector(0, np.array(vals, dtype=object if exact else float))


def prus_ramp(N: int, exact=True) -> EventuallyConstantSeq:
    """The same ramp as an eventually constant sequence with limit 0."""
    vals = [Fraction(N - k, N) if exact else 1 - k / N for k in range(N)]
    return EventuallyConstantSeq(np.array(vals, dtype=object if exact else float),
                                 Fraction(0) if exact else 0.0)


def _window_abs(x, shift):
    v = x.values
    return np.abs(v - (Fraction(shift) if x.exact else shift))


def kakutani_functional(x: FiniteSupportVector):
    """``sup_k |x_k - 1| - 1``; the zero tail contributes the value 1."""
    if x.size == 0:
        return 0.0
    return max(1, _window_abs(x, 1).max()) - 1


def ones_direction_functional(x: FiniteSupportVector):
    """Renormalized ``sum_k (|x_k - 1| - 1)``, the limit of ``h_y`` along ``y = (1, ..., 1)``."""
    if x.size == 0:
        return 0.0
    if x.start < 0:
        raise DomainError("the ones-direction functional lives on sequences supported in N")
    return _window_abs(x, 1).sum() - x.size


def shift_l1_functional(x: FiniteSupportVector):
    """``||x||_1``, the functional fixed by the shift on l1(Z)."""
    return x.norm(L1)


def basso_functional(x: FiniteSupportVector) -> float:
    """``sqrt((||x||_1 + 1)**2 + ||x||_2**2 + 1) - 1`` as written for the renormed shift."""
    n1, n2 = float(x.norm(L1)), float(x.norm(L2))
    return math.sqrt((n1 + 1) ** 2 + n2**2 + 1) - 1


def prus_functional(x: EventuallyConstantSeq):
    """``max(sup_k |x_k - 1|, |lim x|, |lim x - 1|) - 1``.

    Limit of ``h_{y_s}`` along the resolvent points ``y_s = (1, s, s**2, ...)``
    of the Prus map.
    """
    c = x.tail
    m = max(abs(c), abs(c - 1))
    if len(x):
        m = max(m, np.abs(x.prefix - 1).max())
    return m - 1


CLOSED_FORMS: dict[str, Callable] = {
    "kakutani": kakutani_functional,
    "ones-direction": ones_direction_functional,
    "shift-l1": shift_l1_functional,
    "basso": basso_functional,
    "prus": prus_functional,
}


def closed_form_functional_eval(name: str, x):
    try:
        f = CLOSED_FORMS[name]
    except KeyError:
        raise InvalidParameter(f"unknown closed-form functional {name!r}") from None
    return f(x)


# ---------------------------------------------------------------------------
# random points


def random_vector(rng, max_len=8, lo=0, scale=1.0, natural=True, radius=None):
    """Random finitely supported vector with window inside ``[lo, lo + 2*max_len)``."""
    n = int(rng.integers(1, max_len + 1))
    start = int(rng.integers(0, max_len)) + lo
    if not natural:
        start -= max_len
    vals = rng.uniform(-scale, scale, n)
    vals[rng.random(n) < 0.2] = 0.0
    if radius is not None:
        m = np.abs(vals).max()
        if m > radius:
            vals *= radius / m
    return FiniteSupportVector(start, vals)


def random_ecs(rng, max_len=8, scale=1.0):
    n = int(rng.integers(0, max_len + 1))
    return EventuallyConstantSeq(rng.uniform(-scale, scale, n), float(rng.uniform(-scale, scale)))


def random_alspach_point(rng, level=None, denom_pow=None, moves=None) -> DyadicStepFunction:
    """Random exact element of the Alspach set: values in [0, 2], integral 1."""
    level = int(rng.integers(0, 7)) if level is None else level
    m = int(rng.integers(0, 6)) if denom_pow is None else denom_pow
    n, one, top = 2**level, 2**m, 2 * 2**m
    nums = [one] * n
    for _ in range(moves if moves is not None else 4 * n):
        i, j = (int(v) for v in rng.integers(0, n, 2))
        room = min(top - nums[i], nums[j])
        if room > 0 and i != j:
            amt = int(rng.integers(0, room + 1))
            nums[i] += amt
            nums[j] -= amt
    return DyadicStepFunction(level, nums, m)
