"""Simulation of one phase on one sentinel-delimited block.

The engine runs the machine on a working string ``<X>`` whose sentinels
stand where the block's neighbor cells would be.  Simulation stops when
the machine halts inside the block or when a move lands on a sentinel;
an outcome is accepted when the landing matches the expected out-crossing
(side, milestone and state).

For block 1 the left sentinel is the left end of the tape, so landing on
it means the real machine halts: the state checked there is the one the
move was attempted in, which makes the accepting exit carry state 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

from .crossing import Descriptor
from .ntm_core import LEFT, RIGHT, Machine, NodeBudget

SENTINEL_LEFT = "⟨"   # only used in rendering; never on a tape
SENTINEL_RIGHT = "⟩"


class InconsistentDescriptors(ValueError):
    """The descriptor pair cannot frame any phase on the given block."""


class RejectReason(enum.Enum):
    HALTED_INSIDE = "halted-inside"
    WRONG_STATE = "wrong-state"
    WRONG_EXIT_LEFT = "wrong-exit-left"     # landed on the left sentinel, expected elsewhere
    WRONG_EXIT_RIGHT = "wrong-exit-right"   # landed on the right sentinel, expected elsewhere
    STEP_CAP_EXCEEDED = "step-cap-exceeded"


@dataclass(frozen=True)
class PhaseOutcome:
    accepted: bool
    result: Optional[str]            # block content X* when accepted
    steps: int                       # applied rules, including the exit move
    reject_reason: Optional[RejectReason] = None
    exit_delta: Optional[int] = None
    exit_state: Optional[int] = None
    content: Optional[str] = None    # content at stop time, accepted or not
    choices: tuple[int, ...] = ()


@dataclass(frozen=True)
class RawStop:
    """Where one computation of the block engine stopped."""

    kind: str                # "exit" | "halt" | "cap"
    delta: Optional[int]     # exit side for "exit"
    state: int               # exit state ("exit") or halting state
    content: str
    steps: int
    choices: tuple[int, ...]


def enumerate_block_runs(m: Machine, start_state: int, enter_delta: int, x: str,
                         step_cap: int, left_is_edge: bool,
                         work: Optional[NodeBudget] = None) -> Iterator[RawStop]:
    """Run the machine inside ``<x>``, yielding every distinct stop.

    The head starts on the first cell of ``x`` when entering rightward and
    on its last cell when entering leftward.  Stops are yielded in
    lexicographic branch-choice order.  ``left_is_edge`` marks block 1,
    where landing on the left sentinel reports the pre-move state.

    ``step_cap`` bounds each computation's depth; on branchy machines the
    choice tree can still be exponential in it, so pass a ``work`` budget
    to bound the total enumeration effort.
    """
    if not x:
        raise ValueError("block content must be nonempty")
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    content = list(x)
    size = len(content)
    start_pos = 0 if enter_delta == RIGHT else size - 1
    choices: list[int] = []

    def run(state: int, pos: int, steps: int) -> Iterator[RawStop]:
        while True:
            if m.is_branch_state(state):
                succs = m.branches[state]
                if steps >= step_cap:
                    yield RawStop("cap", None, state, "".join(content), steps, tuple(choices))
                    return
                for idx in range(len(succs)):
                    if work is not None:
                        work.charge()
                    choices.append(idx)
                    yield from run(succs[idx], pos, steps + 1)
                    choices.pop()
                return
            rule = m.rule_for(state, content[pos])
            if rule is None:
                yield RawStop("halt", None, state, "".join(content), steps, tuple(choices))
                return
            if steps >= step_cap:
                yield RawStop("cap", None, state, "".join(content), steps, tuple(choices))
                return
            if work is not None:
                work.charge()
            steps += 1
            if rule.write is not None:
                old = content[pos]
                content[pos] = rule.write
                yield from run(rule.next_state, pos, steps)
                content[pos] = old
                return
            new_pos = pos + rule.move
            if new_pos < 0:
                # left sentinel: at the tape edge the machine halts in the
                # state it attempted the move in
                state_out = state if left_is_edge else rule.next_state
                yield RawStop("exit", LEFT, state_out, "".join(content), steps, tuple(choices))
                return
            if new_pos >= size:
                yield RawStop("exit", RIGHT, rule.next_state, "".join(content), steps, tuple(choices))
                return
            state, pos = rule.next_state, new_pos

    yield from run(start_state, start_pos, 0)


def block_index_for(d_in: Descriptor) -> int:
    """Block a phase runs on, given its in-crossing."""
    return d_in.milestone + 1 if d_in.delta == RIGHT else d_in.milestone


def validate_descriptor_pair(d_in: Descriptor, d_out: Descriptor) -> int:
    """Check the pair can frame a phase; returns the block index."""
    if d_out.phase != d_in.phase + 1:
        raise InconsistentDescriptors(
            f"out-crossing must carry phase {d_in.phase + 1}, got {d_out.phase}")
    if d_in.delta not in (LEFT, RIGHT) or d_out.delta not in (LEFT, RIGHT):
        raise InconsistentDescriptors("directions must be -1 or +1")
    block = block_index_for(d_in)
    if block < 1:
        raise InconsistentDescriptors(f"in-crossing {d_in.astuple()} does not enter any block")
    if d_out.milestone not in (block - 1, block):
        raise InconsistentDescriptors(
            f"out-crossing milestone {d_out.milestone} does not border block {block}")
    return block


def simulate_phase(m: Machine, d_in: Descriptor, d_out: Descriptor, x: str,
                   step_cap: int, work: Optional[NodeBudget] = None) -> list[PhaseOutcome]:
    """Enumerate every distinct way one phase can run on ``x``.

    Accepted outcomes leave the block through the sentinel named by
    ``d_out`` (left sentinel and milestone ``block-1`` for ``delta == -1``,
    right sentinel and milestone ``block`` for ``delta == +1``) in state
    ``d_out.state``; everything else is returned rejected with a reason.
    Outcomes are deduplicated on ``(content, state, exit side)``, keeping
    the cheapest realization (fewest steps, then lexicographically least
    choices), and listed in first-encounter order, which is lexicographic
    in the branch choices.
    """
    block = validate_descriptor_pair(d_in, d_out)
    if len(x) < 1:
        raise ValueError("block content must be nonempty")
    want_side = d_out.delta
    want_milestone_side = block - 1 if d_out.delta == LEFT else block
    side_matches = want_milestone_side == d_out.milestone

    seen: dict[tuple, PhaseOutcome] = {}
    for stop in enumerate_block_runs(m, d_in.state, d_in.delta, x, step_cap,
                                     left_is_edge=(block == 1), work=work):
        if stop.kind == "halt":
            out = PhaseOutcome(False, None, stop.steps, RejectReason.HALTED_INSIDE,
                               None, stop.state, stop.content, stop.choices)
        elif stop.kind == "cap":
            out = PhaseOutcome(False, None, stop.steps, RejectReason.STEP_CAP_EXCEEDED,
                               None, stop.state, stop.content, stop.choices)
        elif stop.delta != want_side or not side_matches:
            reason = (RejectReason.WRONG_EXIT_LEFT if stop.delta == LEFT
                      else RejectReason.WRONG_EXIT_RIGHT)
            out = PhaseOutcome(False, None, stop.steps, reason,
                               stop.delta, stop.state, stop.content, stop.choices)
        elif stop.state != d_out.state:
            out = PhaseOutcome(False, None, stop.steps, RejectReason.WRONG_STATE,
                               stop.delta, stop.state, stop.content, stop.choices)
        else:
            out = PhaseOutcome(True, stop.content, stop.steps, None,
                               stop.delta, stop.state, stop.content, stop.choices)
        key = (out.accepted, out.reject_reason, out.content, out.exit_state, out.exit_delta)
        prev = seen.get(key)
        if prev is None or (out.steps, out.choices) < (prev.steps, prev.choices):
            seen[key] = out  # cheaper realization replaces; position is kept
    return list(seen.values())
