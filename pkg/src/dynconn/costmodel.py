"""Simulated CRCW execution substrate: a work/depth meter and core parallel primitives.

Python runs everything sequentially; the meter tracks what a CRCW PRAM running
the same algorithm would pay.  The charging convention is fixed so that cost
slopes are comparable across runs:

  - every scheduled iteration of a parallel loop costs 1 unit,
  - every memory touch / comparison inside a loop body costs 1 unit,
  - plain sequential glue between parallel phases is free,
  - the depth of a parallel construct is 1 + the deepest iteration body, and
    constructs that run one after another inside a scope add their depths.

Two write-conflict policies are supported.  Under the common policy concurrent
writers must agree on the value (a disagreement raises WriteConflictError) and
extremum selection runs the blocked recursion whose round count depends only
on epsilon.  Under the arbitrary policy one writer wins; the winner is drawn
from a seeded generator so runs replay exactly.
"""

from __future__ import annotations

import math
import random
from contextlib import contextmanager


class WriteConflictError(RuntimeError):
    """Concurrent writers disagreed on a cell value under the common policy."""


class MeterError(RuntimeError):
    """An operation exceeded its declared depth budget or misused the meter."""


class CommonPolicy:
    """Common CRCW writes: all concurrent writers of a cell must write the same value."""

    kind = "common"

    def __init__(self, epsilon: float = 0.25):
        if not 0.0 < epsilon <= 1.0:
            raise ValueError("epsilon must be in (0, 1]")
        self.epsilon = epsilon

    def __repr__(self):
        return f"CommonPolicy(epsilon={self.epsilon})"


class ArbitraryPolicy:
    """Arbitrary CRCW writes: any one concurrent writer wins, reproducibly by seed."""

    kind = "arbitrary"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def __repr__(self):
        return f"ArbitraryPolicy(seed={self.seed})"


class CostMeter:
    """Accumulates work and depth for one logical thread of simulated execution.

    Depth is kept per open scope: parallel_for pushes a frame per iteration and
    folds 1 + max(body depths) into the enclosing scope.  Charges made inside
    an ``initialization()`` block go to ``init_work`` and add no depth, since
    structure construction is not part of any per-operation bound.
    """

    def __init__(self, policy):
        self.policy = policy
        self.work = 0
        self.init_work = 0
        self._frames = [0]
        self._init_mode = 0
        self._rng = random.Random(getattr(policy, "seed", 0) ^ 0x5DEECE66D)

    # -- counters ---------------------------------------------------------

    @property
    def depth(self) -> int:
        return self._frames[0]

    def reset(self):
        """Zero work/depth for a fresh measurement window (top level only)."""
        if len(self._frames) != 1:
            raise MeterError("reset inside an open parallel scope")
        self.work = 0
        self._frames[0] = 0

    def charge(self, units: int = 1):
        """Sequential unit operations: work only, no depth."""
        if self._init_mode:
            self.init_work += units
        else:
            self.work += units

    def phase(self):
        """An empty synchronous step: +1 depth, no work."""
        if not self._init_mode:
            self._frames[-1] += 1

    def parallel_charge(self, count: int, unit: int = 1):
        """A flat parallel loop of `count` iterations, each of `unit` body cost.

        Equivalent in cost to parallel_for(count, body charging `unit`) without
        paying Python call overhead per iteration.
        """
        units = count * (1 + unit)
        if self._init_mode:
            self.init_work += units
        else:
            self.work += units
            self._frames[-1] += 1

    def parallel_for(self, count: int, body):
        """Run `body(i)` for i in range(count) with parallel cost semantics.

        Iterations execute sequentially in Python but are charged as one
        synchronous step: depth 1 + max over bodies, work = count scheduling
        units plus the sum of body charges.  Bodies must write disjoint cells
        (or buffer through StepBuffer); this is not re-verified here.
        """
        if self._init_mode:
            self.init_work += count
            for i in range(count):
                body(i)
            return
        self.work += count
        frames = self._frames
        deepest = 0
        for i in range(count):
            frames.append(0)
            body(i)
            d = frames.pop()
            if d > deepest:
                deepest = d
        frames[-1] += 1 + deepest

    @contextmanager
    def initialization(self):
        """Route charges in this block to init_work (construction cost)."""
        self._init_mode += 1
        try:
            yield
        finally:
            self._init_mode -= 1

    @contextmanager
    def operation(self, depth_budget: int | None = None, label: str = ""):
        """Measure the enclosed block; pad its depth up to a fixed budget.

        Padding makes the metered depth of an operation a constant of its kind
        rather than of its input, which is how a constant-time bound is
        presented; exceeding the budget is a hard failure, so the bound stays
        falsifiable.
        """
        base = self._frames[-1]
        yield
        used = self._frames[-1] - base
        if depth_budget is not None:
            if used > depth_budget:
                raise MeterError(
                    f"{label or 'operation'}: depth {used} exceeds budget {depth_budget}"
                )
            self._frames[-1] += depth_budget - used

    # -- primitives ---------------------------------------------------------

    def reduce_extremum(self, values, mode: str = "min"):
        """Return (index, value) of the minimum or maximum of `values`.

        Common policy: blocked recursion on subarrays of size ~n^epsilon; ties
        resolve to the lowest index and the round count (hence depth) depends
        only on epsilon.  Arbitrary policy: one linear pass; a tie is broken by
        the seeded generator.
        """
        n = len(values)
        if n == 0:
            raise ValueError("empty reduction")
        if mode not in ("min", "max"):
            raise ValueError(f"bad mode {mode!r}")
        if self.policy.kind == "common":
            return self._reduce_common(values, mode)
        return self._reduce_arbitrary(values, mode)

    def _reduce_common(self, values, mode):
        n = len(values)
        eps = self.policy.epsilon
        rounds_budget = math.ceil(1.0 / eps) + 2
        block = max(2, math.ceil(n ** eps))
        live = range(n)
        rounds = 0
        while len(live) > 1:
            nxt = []
            pairs = 0
            for start in range(0, len(live), block):
                blk = live[start : start + block]
                pairs += len(blk) * len(blk)
                nxt.append(_block_extremum(values, blk, mode))
            self.parallel_charge(pairs)      # all-pairs comparisons of one round
            self.parallel_charge(len(live))  # per-block winner readout
            live = nxt
            rounds += 1
        if rounds > rounds_budget:
            raise MeterError(f"extremum recursion took {rounds} > {rounds_budget} rounds")
        for _ in range(rounds, rounds_budget):
            self.phase()
            self.phase()
        self.phase()
        idx = live[0] if len(live) else 0
        return idx, values[idx]

    def _reduce_arbitrary(self, values, mode):
        n = len(values)
        self.parallel_charge(n)  # concurrent compare-and-write sweep
        best = values[0]
        if mode == "min":
            for v in values:
                if v < best:
                    best = v
        else:
            for v in values:
                if v > best:
                    best = v
        ties = [i for i, v in enumerate(values) if v == best]
        self.parallel_charge(n)  # tied writers race for the output cell
        pick = ties[self._rng.randrange(len(ties))]
        return pick, best

    def choose_any(self, candidates):
        """Pick one element of a non-empty list, seeded; arbitrary policy only."""
        if not candidates:
            raise ValueError("empty choice")
        if self.policy.kind != "arbitrary":
            raise MeterError("choose_any requires the arbitrary write policy")
        self.parallel_charge(len(candidates))
        return candidates[self._rng.randrange(len(candidates))]

    def prefix_and(self, bits):
        """out[i] = AND of bits[0..i], charged as the all-pairs constant-depth scheme."""
        n = len(bits)
        self.parallel_charge(n)          # initialise output to ones
        self.parallel_charge(n * n)      # pair (i, j<=i) zero-propagation
        out = [0] * n
        acc = 1
        for i, b in enumerate(bits):
            if not b:
                acc = 0
            out[i] = acc
        return out

    def initial_segment_end(self, bits):
        """Largest i with bits[0..i] all ones, or None if bits is empty or starts with 0."""
        n = len(bits)
        if n == 0:
            return None
        prefix = self.prefix_and(bits)
        idx, (p, _) = self.reduce_extremum([(p, i) for i, p in enumerate(prefix)], "max")
        if p == 0:
            return None
        return idx


class StepBuffer:
    """Write buffer for one synchronous parallel step.

    Writes land here during a step and publish when the step ends.  Under the
    common policy two writers disagreeing on one cell is a model violation and
    raises; under the arbitrary policy a seeded winner is kept per cell.
    """

    def __init__(self, meter: CostMeter):
        self.meter = meter
        self._pending = {}

    def write(self, cell, value):
        self.meter.charge(1)
        if self.meter.policy.kind == "common":
            if cell in self._pending and self._pending[cell] != value:
                raise WriteConflictError(f"conflicting writes to cell {cell!r}")
            self._pending[cell] = value
        else:
            self._pending.setdefault(cell, []).append(value)

    def publish(self) -> dict:
        """Resolve and return {cell: value}; the buffer empties."""
        if self.meter.policy.kind == "common":
            out = dict(self._pending)
        else:
            rng = self.meter._rng
            out = {c: vs[rng.randrange(len(vs))] for c, vs in self._pending.items()}
        self._pending.clear()
        return out


def _block_extremum(values, block, mode):
    """Lowest-index extremum of `values` restricted to index iterable `block`."""
    it = iter(block)
    best_i = next(it)
    best_v = values[best_i]
    if mode == "min":
        for i in it:
            v = values[i]
            if v < best_v:
                best_v, best_i = v, i
    else:
        for i in it:
            v = values[i]
            if v > best_v:
                best_v, best_i = v, i
    return best_i
