"""FLOPs ledger and the cost conventions every comparison is built on.

Conventions (fixed, not measured):
  * a backward pass is charged at exactly 2x the forward FLOPs it pairs with;
    the exact engine-counted backward cost is kept in a side counter that is
    never part of the total,
  * one Adam update costs ADAM_FLOPS_PER_SCALAR per trainable scalar,
  * writing ``entry + tau * delta`` into the model costs 2 FLOPs per scalar
    (one multiply, one add).

Held-out test evaluations are charged to ``eval_forward`` in both arms of a
comparison and excluded symmetrically from ``comparable_total()``, which is
what ``savings`` uses.

A ledger is activated for a stretch of code with ``scope(ledger, category)``;
the scope is thread-local so independent runs can proceed in parallel threads.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

from .errors import ContractError

CATEGORIES = (
    "forward_train",
    "backward_train",
    "optimizer_update",
    "ff_val_forward",
    "ff_param_set",
    "eval_forward",
)

BACKWARD_FORWARD_RATIO = 2
ADAM_FLOPS_PER_SCALAR = 10
SGD_FLOPS_PER_SCALAR = 2
PARAM_SET_FLOPS_PER_SCALAR = 2


class FlopsLedger:
    """Cumulative per-category FLOP counters; total always equals their sum."""

    __slots__ = ("counts", "total", "backward_exact", "charge_calls")

    def __init__(self) -> None:
        self.counts = {c: 0 for c in CATEGORIES}
        self.total = 0
        self.backward_exact = 0  # side counter, excluded from total
        self.charge_calls = 0

    def charge(self, category: str, flops: int) -> None:
        if category not in self.counts:
            raise ContractError(f"unknown ledger category {category!r}")
        if flops < 0:
            raise ContractError(f"cannot charge negative FLOPs ({flops})")
        self.counts[category] += flops
        self.total += flops
        self.charge_calls += 1

    def charge_backward_for(self, forward_flops: int) -> None:
        """Charge the paired backward pass at the fixed 2x convention."""
        self.charge("backward_train", BACKWARD_FORWARD_RATIO * forward_flops)

    def add_backward_exact(self, flops: int) -> None:
        self.backward_exact += flops

    def comparable_total(self) -> int:
        """Total minus held-out-evaluation cost; the basis of savings."""
        return self.total - self.counts["eval_forward"]

    def snapshot(self) -> dict:
        snap = {"total": self.total}
        snap.update(self.counts)
        snap["backward_exact"] = self.backward_exact
        return snap

    def __repr__(self) -> str:  # pragma: no cover
        return f"FlopsLedger(total={self.total})"


_active = threading.local()


@contextmanager
def scope(ledger: FlopsLedger | None, category: str):
    """Activate (ledger, category) for engine-op charging; None is a no-op."""
    if ledger is not None and category not in CATEGORIES:
        raise ContractError(f"unknown ledger category {category!r}")
    prev = getattr(_active, "target", None)
    _active.target = None if ledger is None else (ledger, category)
    try:
        yield ledger
    finally:
        _active.target = prev


def charge_active(flops: int) -> None:
    """Charge the active scope's ledger; silently a no-op when inactive."""
    target = getattr(_active, "target", None)
    if target is not None:
        ledger, category = target
        ledger.charge(category, flops)


def add_backward_exact_active(flops: int) -> None:
    target = getattr(_active, "target", None)
    if target is not None:
        target[0].add_backward_exact(flops)


def savings(baseline: FlopsLedger, ff: FlopsLedger) -> float:
    """Fraction of training FLOPs the second ledger saved over the first.

    Negative when the fast-forward arm lost. Held-out evaluation FLOPs are
    excluded from both sides.
    """
    base = baseline.comparable_total()
    if base <= 0:
        raise ContractError("baseline ledger has no training FLOPs to compare")
    return 1.0 - ff.comparable_total() / base


def forward_flops_estimate(model, batch) -> int:
    """Engine-counted FLOPs of one forward pass on this batch shape."""
    from .tensor import no_grad

    scratch = FlopsLedger()
    with no_grad(), scope(scratch, "forward_train"):
        model.loss(batch)
    return scratch.counts["forward_train"]
