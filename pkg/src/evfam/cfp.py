"""Cutter operators and the sequential projection iteration over R^J.

Operators are exact closed-form projections (half-space, hyperplane, ball,
box, affine equality) plus the subgradient projector for piecewise-affine
convex level sets, with averaging and relaxation wrappers.  The iteration
x_{n+1} = x_n + lambda_n (T_{i(n)}(x_n) - x_n) runs under cyclic,
almost-cyclic, or explicit index controls and records a full replayable
trace.

Operator indices are 1-based in every public artifact (patterns, trace
records, reports) and 0-based only inside internal lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FIX_TOL = 1e-9


def _vec(x, dim=None):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError("points are flat coordinate vectors")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.isfinite(v).all():
        raise ValueError("points must be finite")
    return v


class Operator:
    """Base operator on R^J with a declared cutter flag and fix oracle."""

    kind = "abstract"
    is_cutter = True
    demiclosed_at_zero = True

    def __init__(self, dim):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def apply(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.apply(_vec(x, self.dim))

    def fix_residual(self, x):
        x = _vec(x, self.dim)
        return float(np.linalg.norm(self.apply(x) - x))

    def in_fix(self, x, tol=FIX_TOL):
        return self.fix_residual(x) <= tol


class Halfspace(Operator):
    """Projection onto {u : <a,u> <= b}."""

    kind = "halfspace"

    def __init__(self, a, b):
        a = _vec(a)
        super().__init__(a.shape[0])
        self.norm2 = float(a @ a)
        if self.norm2 == 0.0:
            raise ValueError("the normal vector must be nonzero")
        self.a = a
        self.b = float(b)

    def apply(self, x):
        slack = float(self.a @ x) - self.b
        if slack <= 0.0:
            return x
        return x - (slack / self.norm2) * self.a

    def __repr__(self):
        return f"Halfspace(a={self.a.tolist()}, b={self.b})"


class Hyperplane(Operator):
    """Projection onto {u : <a,u> = b}."""

    kind = "hyperplane"

    def __init__(self, a, b):
        a = _vec(a)
        super().__init__(a.shape[0])
        self.norm2 = float(a @ a)
        if self.norm2 == 0.0:
            raise ValueError("the normal vector must be nonzero")
        self.a = a
        self.b = float(b)

    def apply(self, x):
        return x - ((float(self.a @ x) - self.b) / self.norm2) * self.a

    def __repr__(self):
        return f"Hyperplane(a={self.a.tolist()}, b={self.b})"


class Ball(Operator):
    """Projection onto a closed Euclidean ball."""

    kind = "ball"

    def __init__(self, center, radius):
        center = _vec(center)
        super().__init__(center.shape[0])
        if not radius > 0:
            raise ValueError("the radius must be positive")
        self.center = center
        self.radius = float(radius)

    def apply(self, x):
        d = x - self.center
        dist = float(np.linalg.norm(d))
        if dist <= self.radius:
            return x
        return self.center + (self.radius / dist) * d

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class Box(Operator):
    """Componentwise clip onto [lo, hi]."""

    kind = "box"

    def __init__(self, lo, hi):
        lo, hi = _vec(lo), _vec(hi)
        if lo.shape != hi.shape:
            raise ValueError("bound shapes differ")
        if not (lo <= hi).all():
            raise ValueError("need lo <= hi componentwise")
        super().__init__(lo.shape[0])
        self.lo = lo
        self.hi = hi

    def apply(self, x):
        return np.clip(x, self.lo, self.hi)

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class AffineEquality(Operator):
    """Projection onto {u : Au = d} with A of full row rank."""

    kind = "affine"

    def __init__(self, A, d):
        A = np.asarray(A, dtype=float)
        d = _vec(d)
        if A.ndim != 2 or A.shape[0] != d.shape[0]:
            raise ValueError("matrix and right-hand side shapes differ")
        if not np.isfinite(A).all():
            raise ValueError("matrix entries must be finite")
        super().__init__(A.shape[1])
        gram = A @ A.T
        try:
            np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            raise ValueError("the matrix must have full row rank") from None
        self.A = A
        self.d = d
        # pseudo-inverse factor: x - M (Ax - d) lands on the flat
        self.M = np.linalg.solve(gram, A).T

    def apply(self, x):
        return x - self.M @ (self.A @ x - self.d)

    def __repr__(self):
        return f"AffineEquality(A={self.A.tolist()}, d={self.d.tolist()})"


class SubgradientProjector(Operator):
    """Subgradient projector onto {f <= 0} for f = max of affine pieces.

    At x with f(x) > 0 the step is x - f(x)/|g|^2 g with g the slope of
    the lowest-index maximizing piece.  A cutter, but not firmly
    nonexpansive in general (the map is discontinuous across piece seams).
    """

    kind = "subgradient_projector"

    def __init__(self, slopes, offsets):
        slopes = np.asarray(slopes, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        if slopes.ndim != 2 or slopes.shape[0] != offsets.shape[0]:
            raise ValueError("slope and offset shapes differ")
        if slopes.shape[0] == 0:
            raise ValueError("need at least one affine piece")
        if not (np.isfinite(slopes).all() and np.isfinite(offsets).all()):
            raise ValueError("pieces must be finite")
        for k in range(slopes.shape[0]):
            if not slopes[k].any() and offsets[k] > 0:
                raise ValueError(
                    f"piece {k} is the positive constant {offsets[k]}: level set empty"
                )
        super().__init__(slopes.shape[1])
        self.slopes = slopes
        self.offsets = offsets

    def value(self, x):
        return float(np.max(self.slopes @ x + self.offsets))

    def apply(self, x):
        vals = self.slopes @ x + self.offsets
        fx = float(vals.max())
        if fx <= 0.0:
            return x
        k = int(np.argmax(vals))  # lowest index among maximizers
        g = self.slopes[k]
        return x - (fx / float(g @ g)) * g

    def __repr__(self):
        return (
            f"SubgradientProjector(slopes={self.slopes.tolist()}, "
            f"offsets={self.offsets.tolist()})"
        )


class Averaged(Operator):
    """Midpoint of the identity and an inner operator."""

    kind = "firmly_nonexpansive_avg"

    def __init__(self, inner):
        super().__init__(inner.dim)
        self.inner = inner
        self.is_cutter = inner.is_cutter
        self.demiclosed_at_zero = inner.demiclosed_at_zero

    def apply(self, x):
        return 0.5 * (x + self.inner.apply(x))

    def in_fix(self, x, tol=FIX_TOL):
        return self.inner.in_fix(x, tol)

    def __repr__(self):
        return f"Averaged({self.inner!r})"


class Relaxed(Operator):
    """x + lambda (T(x) - x) for a fixed lambda in [0, 2]."""

    kind = "relaxed"

    def __init__(self, inner, lam):
        lam = float(lam)
        if not 0.0 <= lam <= 2.0:
            raise ValueError("the relaxation parameter must lie in [0, 2]")
        super().__init__(inner.dim)
        self.inner = inner
        self.lam = lam
        # the cutter property survives relaxation only up to lambda = 1
        self.is_cutter = inner.is_cutter and lam <= 1.0
        self.demiclosed_at_zero = inner.demiclosed_at_zero

    def apply(self, x):
        if self.lam == 0.0:
            return x
        return x + self.lam * (self.inner.apply(x) - x)

    def in_fix(self, x, tol=FIX_TOL):
        if self.lam == 0.0:
            return True
        return self.inner.in_fix(x, tol)

    def __repr__(self):
        return f"Relaxed({self.inner!r}, lam={self.lam})"


def apply_operator(op, x):
    return op(x)


def relax(op, lam):
    return Relaxed(op, lam)


def cutter_check(op, x, z, tol=1e-10):
    """<T(x) - x, T(x) - z> <= 0 for a fixed point z."""
    x = _vec(x, op.dim)
    z = _vec(z, op.dim)
    if not op.in_fix(z):
        raise ValueError("the reference point is not a fixed point")
    tx = op.apply(x)
    return float((tx - x) @ (tx - z)) <= tol


def fne_check(op, x, y, tol=1e-10):
    """|T(x) - T(y)|^2 <= <T(x) - T(y), x - y>."""
    x = _vec(x, op.dim)
    y = _vec(y, op.dim)
    d = op.apply(x) - op.apply(y)
    return float(d @ d) <= float(d @ (x - y)) + tol


# ---------------------------------------------------------------------------
# controls


class ControlExhausted(Exception):
    pass


class Control:
    kind = "abstract"

    def label(self, n) -> int:
        """1-based operator index at step n (n counts from 0)."""
        raise NotImplementedError


class CyclicControl(Control):
    kind = "cyclic"

    def __init__(self, m):
        self.m = int(m)
        if self.m < 1:
            raise ValueError("need at least one operator")

    def label(self, n):
        return n % self.m + 1

    def __repr__(self):
        return f"CyclicControl(m={self.m})"


class AlmostCyclicControl(Control):
    """A finite pattern of 1-based labels repeated forever."""

    kind = "almost_cyclic"

    def __init__(self, pattern, m=None):
        self.pattern = tuple(int(i) for i in pattern)
        if not self.pattern:
            raise ValueError("the pattern must be nonempty")
        self.m = int(m) if m is not None else max(self.pattern)
        for i in self.pattern:
            if not 1 <= i <= self.m:
                raise ValueError(f"label {i} outside 1..{self.m}")

    def label(self, n):
        return self.pattern[n % len(self.pattern)]

    def __repr__(self):
        return f"AlmostCyclicControl(pattern={self.pattern}, m={self.m})"


class ExplicitControl(Control):
    """A finite list of labels; running past the end stops the solver."""

    kind = "explicit"

    def __init__(self, indices, m=None):
        self.indices = tuple(int(i) for i in indices)
        if not self.indices:
            raise ValueError("the index list must be nonempty")
        self.m = int(m) if m is not None else max(self.indices)
        for i in self.indices:
            if not 1 <= i <= self.m:
                raise ValueError(f"label {i} outside 1..{self.m}")

    def label(self, n):
        if n >= len(self.indices):
            raise ControlExhausted(n)
        return self.indices[n]

    def __repr__(self):
        return f"ExplicitControl(indices={self.indices}, m={self.m})"


def _window_constant(labels, m, cyclic):
    """Smallest window length covering every label, by gap analysis."""
    L = len(labels)
    worst = 0
    for j in range(1, m + 1):
        pos = [k for k, i in enumerate(labels) if i == j]
        if not pos:
            raise ValueError(f"operator {j} never appears: no finite window constant")
        if cyclic:
            gaps = [b - a for a, b in zip(pos, pos[1:])]
            gaps.append(pos[0] + L - pos[-1])
        else:
            gaps = [pos[0] + 1, L - pos[-1]]
            gaps.extend(b - a for a, b in zip(pos, pos[1:]))
        worst = max(worst, max(gaps))
    return worst


def control_validate(ctrl, m=None, horizon=None):
    """Minimal validated almost-cyclicality constant of a control."""
    m = ctrl.m if m is None else int(m)
    if m != ctrl.m:
        raise ValueError(f"control covers {ctrl.m} operators, problem has {m}")
    if isinstance(ctrl, CyclicControl):
        return ctrl.m
    if isinstance(ctrl, AlmostCyclicControl):
        c = _window_constant(ctrl.pattern, m, cyclic=True)
    elif isinstance(ctrl, ExplicitControl):
        c = _window_constant(ctrl.indices, m, cyclic=False)
        if len(ctrl.indices) < 2 * c:
            raise ValueError("the index list is too short to certify its window constant")
    else:
        raise TypeError(f"unknown control {ctrl!r}")
    if horizon is not None and horizon < 2 * c:
        raise ValueError("the horizon is too short to certify the window constant")
    return c


# ---------------------------------------------------------------------------
# relaxation schedules


class ConstantRelaxation:
    kind = "constant"

    def __init__(self, value=1.0):
        value = float(value)
        if not 0.0 <= value <= 2.0:
            raise ValueError("relaxation parameters live in [0, 2]")
        self.value = value

    def lam(self, n):
        return self.value

    def bounds(self):
        return (self.value, self.value)

    def __repr__(self):
        return f"ConstantRelaxation({self.value})"


class CyclicRelaxation:
    kind = "cyclic"

    def __init__(self, values):
        self.values = tuple(float(v) for v in values)
        if not self.values:
            raise ValueError("need at least one relaxation value")
        for v in self.values:
            if not 0.0 <= v <= 2.0:
                raise ValueError("relaxation parameters live in [0, 2]")

    def lam(self, n):
        return self.values[n % len(self.values)]

    def bounds(self):
        return (min(self.values), max(self.values))

    def __repr__(self):
        return f"CyclicRelaxation({self.values})"


# ---------------------------------------------------------------------------
# the iteration


@dataclass
class StopRule:
    tol: float = 1e-6
    max_iter: int = 100000
    stride: int = 10

    def __post_init__(self):
        if self.tol < 0 or self.max_iter < 0 or self.stride < 1:
            raise ValueError("bad stop rule")


class AcsaDivergence(Exception):
    pass


@dataclass
class Trace:
    iterates: list  # numpy vectors x_0 .. x_N
    controls: list = field(default_factory=list)  # 1-based label per step
    relaxations: list = field(default_factory=list)
    residuals: list = field(default_factory=list)  # per-step |T(x_n) - x_n|
    checkpoints: list = field(default_factory=list)  # (n, max residual)
    converged: bool = False
    stop_reason: str = ""

    @property
    def final(self):
        return self.iterates[-1]

    @property
    def n_steps(self):
        return len(self.iterates) - 1


def _max_residual(ops, x):
    return max(op.fix_residual(x) for op in ops)


def acsa_run(ops, ctrl, relaxation, x0, stop=None):
    """Runs the sequential iteration until a checkpoint meets the residual
    tolerance, the iteration cap, or an explicit control runs out."""
    ops = list(ops)
    if not ops:
        raise ValueError("need at least one operator")
    dim = ops[0].dim
    for op in ops:
        if op.dim != dim:
            raise ValueError("operator dimensions differ")
    if ctrl.m != len(ops):
        raise ValueError(f"control covers {ctrl.m} operators, problem has {len(ops)}")
    stop = stop or StopRule()
    x = _vec(x0, dim)

    trace = Trace(iterates=[x])
    n = 0
    while True:
        at_cap = n >= stop.max_iter
        if n % stop.stride == 0 or at_cap:
            maxres = _max_residual(ops, x)
            trace.checkpoints.append((n, maxres))
            if maxres <= stop.tol:
                trace.converged = True
                trace.stop_reason = "converged"
                break
        if at_cap:
            trace.stop_reason = "max_iter"
            break
        try:
            label = ctrl.label(n)
        except ControlExhausted:
            if not trace.checkpoints or trace.checkpoints[-1][0] != n:
                trace.checkpoints.append((n, _max_residual(ops, x)))
            trace.stop_reason = "control_exhausted"
            break
        lam = relaxation.lam(n)
        if not 0.0 <= lam <= 2.0:
            raise ValueError(f"relaxation {lam} at step {n} outside [0, 2]")
        tx = ops[label - 1].apply(x)
        step = tx - x
        x_next = x + lam * step
        if not np.isfinite(x_next).all():
            raise AcsaDivergence(
                f"non-finite iterate at step {n} (operator {label}, lambda {lam})"
            )
        trace.controls.append(label)
        trace.relaxations.append(lam)
        trace.residuals.append(float(np.linalg.norm(step)))
        trace.iterates.append(x_next)
        x = x_next
        n += 1
    return trace


def replay_trace(ops, trace):
    """Re-executes the recurrence over a stored trace; returns the largest
    deviation from the recorded iterates."""
    x = _vec(trace.iterates[0], ops[0].dim)
    worst = 0.0
    for k, (label, lam) in enumerate(zip(trace.controls, trace.relaxations)):
        x = x + lam * (ops[label - 1].apply(x) - x)
        dev = float(np.linalg.norm(x - _vec(trace.iterates[k + 1], ops[0].dim)))
        worst = max(worst, dev)
    return worst


def fejer_slack(trace, z):
    """Largest per-step increase of the distance to z (negative means the
    distances strictly decrease)."""
    z = np.asarray(z, dtype=float)
    worst = -np.inf
    for a, b in zip(trace.iterates, trace.iterates[1:]):
        before = float(np.linalg.norm(a - z))
        after = float(np.linalg.norm(b - z))
        worst = max(worst, after - before)
    return worst


# ---------------------------------------------------------------------------
# random instances


def random_feasible_instance(dim, m, rng, radius=0.1, margin=0.5):
    """Half-space problem built around a known interior ball.

    Returns (operators, center): each half-space contains the closed ball
    of the given radius around the center, so the intersection is fat and
    the center is a strict interior solution.
    """
    center = rng.normal(size=dim)
    ops = []
    for _ in range(m):
        a = rng.normal(size=dim)
        a = a / np.linalg.norm(a)
        b = float(a @ center) + radius + float(rng.uniform(0.0, margin))
        ops.append(Halfspace(a, b))
    return ops, center


def random_almost_cyclic_pattern(m, rng):
    """A pattern hitting every operator, with window constant at most 2m."""
    pattern = list(range(1, m + 1))
    rng.shuffle(pattern)
    extras = int(rng.integers(0, m + 1))
    for _ in range(extras):
        pos = int(rng.integers(0, len(pattern) + 1))
        pattern.insert(pos, int(rng.integers(1, m + 1)))
    return tuple(pattern)


# ---------------------------------------------------------------------------
# JSON


def operator_to_json(op):
    if isinstance(op, Halfspace):
        return {"kind": "halfspace", "a": op.a.tolist(), "b": op.b}
    if isinstance(op, Hyperplane):
        return {"kind": "hyperplane", "a": op.a.tolist(), "b": op.b}
    if isinstance(op, Ball):
        return {"kind": "ball", "center": op.center.tolist(), "radius": op.radius}
    if isinstance(op, Box):
        return {"kind": "box", "lo": op.lo.tolist(), "hi": op.hi.tolist()}
    if isinstance(op, AffineEquality):
        return {"kind": "affine", "A": op.A.tolist(), "d": op.d.tolist()}
    if isinstance(op, SubgradientProjector):
        return {
            "kind": "subgradient_projector",
            "slopes": op.slopes.tolist(),
            "offsets": op.offsets.tolist(),
        }
    if isinstance(op, Averaged):
        return {"kind": "firmly_nonexpansive_avg", "inner": operator_to_json(op.inner)}
    if isinstance(op, Relaxed):
        return {"kind": "relaxed", "inner": operator_to_json(op.inner), "lambda": op.lam}
    raise ValueError(f"operator kind {op.kind!r} has no JSON form")


def operator_from_json(obj, normalize=False):
    kind = obj["kind"]
    if kind == "halfspace" or kind == "hyperplane":
        a = np.asarray(obj["a"], dtype=float)
        b = float(obj["b"])
        if normalize:
            scale = np.linalg.norm(a)
            if scale == 0:
                raise ValueError("the normal vector must be nonzero")
            a, b = a / scale, b / scale
        cls = Halfspace if kind == "halfspace" else Hyperplane
        return cls(a, b)
    if kind == "ball":
        return Ball(obj["center"], obj["radius"])
    if kind == "box":
        return Box(obj["lo"], obj["hi"])
    if kind == "affine":
        return AffineEquality(obj["A"], obj["d"])
    if kind == "subgradient_projector":
        return SubgradientProjector(obj["slopes"], obj["offsets"])
    if kind == "firmly_nonexpansive_avg":
        return Averaged(operator_from_json(obj["inner"], normalize))
    if kind == "relaxed":
        return Relaxed(operator_from_json(obj["inner"], normalize), obj["lambda"])
    raise ValueError(f"unknown operator kind {kind!r}")


def control_to_json(ctrl):
    if isinstance(ctrl, CyclicControl):
        return {"kind": "cyclic"}
    if isinstance(ctrl, AlmostCyclicControl):
        return {"kind": "almost_cyclic", "pattern": list(ctrl.pattern)}
    if isinstance(ctrl, ExplicitControl):
        return {"kind": "explicit", "indices": list(ctrl.indices)}
    raise ValueError(f"unknown control {ctrl!r}")


def control_from_json(obj, m):
    kind = obj["kind"]
    if kind == "cyclic":
        return CyclicControl(m)
    if kind == "almost_cyclic":
        return AlmostCyclicControl(obj["pattern"], m)
    if kind == "explicit":
        return ExplicitControl(obj["indices"], m)
    raise ValueError(f"unknown control kind {kind!r}")


def relaxation_to_json(sched):
    if isinstance(sched, ConstantRelaxation):
        return {"kind": "constant", "value": sched.value}
    if isinstance(sched, CyclicRelaxation):
        return {"kind": "cyclic", "values": list(sched.values)}
    raise ValueError(f"unknown relaxation schedule {sched!r}")


def relaxation_from_json(obj):
    kind = obj["kind"]
    if kind == "constant":
        return ConstantRelaxation(obj["value"])
    if kind == "cyclic":
        return CyclicRelaxation(obj["values"])
    raise ValueError(f"unknown relaxation kind {kind!r}")


def problem_to_json(ops, ctrl, sched, x0, stop):
    return {
        "dim": ops[0].dim,
        "operators": [operator_to_json(op) for op in ops],
        "control": control_to_json(ctrl),
        "relaxation": relaxation_to_json(sched),
        "x0": list(np.asarray(x0, dtype=float)),
        "stop": {"tol": stop.tol, "max_iter": stop.max_iter, "stride": stop.stride},
    }


def problem_from_json(obj, normalize=False):
    ops = [operator_from_json(o, normalize) for o in obj.get("operators", [])]
    if not ops:
        raise ValueError("the operator list is empty")
    dim = int(obj["dim"])
    for op in ops:
        if op.dim != dim:
            raise ValueError("operator dimensions disagree with the problem")
    ctrl = control_from_json(obj["control"], len(ops))
    sched = relaxation_from_json(obj.get("relaxation", {"kind": "constant", "value": 1.0}))
    x0 = _vec(obj["x0"], dim)
    s = obj.get("stop", {})
    stop = StopRule(
        tol=float(s.get("tol", 1e-6)),
        max_iter=int(s.get("max_iter", 100000)),
        stride=int(s.get("stride", 10)),
    )
    return ops, ctrl, sched, x0, stop


def trace_records(trace):
    """Flat per-iterate records: the first carries only the start point."""
    records = [{"n": 0, "x": list(map(float, trace.iterates[0]))}]
    for k in range(trace.n_steps):
        records.append(
            {
                "n": k + 1,
                "i": trace.controls[k],
                "lambda": trace.relaxations[k],
                "x": list(map(float, trace.iterates[k + 1])),
                "res": trace.residuals[k],
            }
        )
    return records


def trace_from_records(records):
    records = list(records)
    if not records or records[0].get("n") != 0:
        raise ValueError("trace records must start at n = 0")
    iterates = [np.asarray(records[0]["x"], dtype=float)]
    controls, relaxations, residuals = [], [], []
    for k, rec in enumerate(records[1:], start=1):
        if rec.get("n") != k:
            raise ValueError(f"trace records out of order at {rec.get('n')!r}")
        iterates.append(np.asarray(rec["x"], dtype=float))
        controls.append(int(rec["i"]))
        relaxations.append(float(rec["lambda"]))
        residuals.append(float(rec["res"]))
    return Trace(
        iterates=iterates,
        controls=controls,
        relaxations=relaxations,
        residuals=residuals,
    )


def trace_summary(ops, trace):
    x = trace.final
    return {
        "final": list(map(float, x)),
        "iterations": trace.n_steps,
        "max_residual": _max_residual(ops, x),
        "converged": trace.converged,
        "stop_reason": trace.stop_reason,
    }
