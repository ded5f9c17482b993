"""Normal-form single-tape nondeterministic Turing machines.

The machine model used throughout this package:

* one half-infinite tape, cells numbered 1, 2, 3, ...; the blank symbol is
  the literal token ``"0"``;
* states are the integers 0, 1, ..., ``state_count - 1``; state 0 is the
  initial state and state 1 is the only accepting state;
* a deterministic state either moves the head one cell (left/right) or
  writes a symbol, never both; a nondeterministic state only picks one of
  at least two successor states, without moving or writing;
* a run halts when it attempts to move left from cell 1 (accepting exactly
  when that attempt is made in state 1) or when no rule applies.

Every applied rule costs one unit of time, including branch picks and the
final halting move attempt.  Space is the number of distinct cells the
head visits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

LEFT = -1
RIGHT = +1
BLANK = "0"

DEFAULT_NODE_CAP = 10_000_000


class MachineFormatError(ValueError):
    """Raised when a machine description cannot be parsed or is invalid."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceCapExceeded(RuntimeError):
    """A bounded search ran out of its explored-node budget.

    Distinct from rejection: the question was not decided.
    """


class NodeBudget:
    """Mutable work allowance shared across the calls of one search.

    Charged once per applied rule; exceeding the limit raises
    :class:`ResourceCapExceeded` so callers can distinguish "too much work"
    from a verdict.
    """

    __slots__ = ("limit", "used", "what")

    def __init__(self, limit: int, what: str = "search"):
        self.limit = limit
        self.used = 0
        self.what = what

    def charge(self, amount: int = 1):
        self.used += amount
        if self.used > self.limit:
            raise ResourceCapExceeded(f"{self.what} exceeded node cap {self.limit}")


# ---------------------------------------------------------------------------
# machine model


@dataclass(frozen=True)
class DetRule:
    """Action of a deterministic state on one symbol.

    Exactly one of ``move`` / ``write`` should be set; this is *not*
    enforced at construction time so that malformed rules can be built and
    reported by :func:`validate_normal_form`.
    """

    next_state: int
    move: Optional[int] = None
    write: Optional[str] = None

    def is_move(self):
        return self.move is not None and self.write is None

    def is_write(self):
        return self.write is not None and self.move is None


@dataclass(frozen=True)
class Machine:
    """A normal-form NTM description.

    ``rules`` maps ``(state, symbol)`` to a :class:`DetRule` for
    deterministic states; ``branches`` maps a nondeterministic state to its
    ordered tuple of successor states.  Treat instances as immutable.
    """

    name: str
    state_count: int
    alphabet: tuple[str, ...]
    rules: dict[tuple[int, str], DetRule] = field(default_factory=dict)
    branches: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def is_branch_state(self, state: int) -> bool:
        return state in self.branches

    def rule_for(self, state: int, symbol: str) -> Optional[DetRule]:
        return self.rules.get((state, symbol))


@dataclass(frozen=True)
class Violation:
    """One normal-form violation, naming the offending state/symbol."""

    kind: str
    state: Optional[int] = None
    symbol: Optional[str] = None
    detail: str = ""

    def __str__(self):
        where = []
        if self.state is not None:
            where.append(f"state {self.state}")
        if self.symbol is not None:
            where.append(f"symbol {self.symbol!r}")
        loc = ", ".join(where)
        return f"{self.kind}({loc}): {self.detail}" if loc else f"{self.kind}: {self.detail}"


def validate_normal_form(m: Machine) -> list[Violation]:
    """Check every normal-form invariant; an empty list means valid."""
    out: list[Violation] = []
    if BLANK not in m.alphabet:
        out.append(Violation("missing-blank", detail=f"alphabet must contain {BLANK!r}"))
    if m.state_count < 2:
        out.append(Violation("too-few-states", detail="need at least states 0 (initial) and 1 (accepting)"))
    seen_symbols = set(m.alphabet)
    if len(seen_symbols) != len(m.alphabet):
        out.append(Violation("duplicate-symbol", detail="alphabet symbols must be distinct"))

    det_states = {q for (q, _s) in m.rules}
    for q in sorted(det_states & set(m.branches)):
        out.append(Violation("mixed-state", state=q, detail="state has both deterministic rules and branches"))

    for (q, s), rule in m.rules.items():
        if not (0 <= q < m.state_count):
            out.append(Violation("bad-state-id", state=q, detail="rule state out of range"))
        if s not in seen_symbols:
            out.append(Violation("unknown-symbol", state=q, symbol=s, detail="rule symbol not in alphabet"))
        if rule.move is not None and rule.write is not None:
            out.append(Violation("move-and-write", state=q, symbol=s, detail="rule both moves and writes"))
        elif rule.move is None and rule.write is None:
            out.append(Violation("no-action", state=q, symbol=s, detail="rule neither moves nor writes"))
        if rule.move is not None and rule.move not in (LEFT, RIGHT):
            out.append(Violation("bad-direction", state=q, symbol=s, detail=f"direction must be -1 or +1, got {rule.move}"))
        if rule.write is not None and rule.write not in seen_symbols:
            out.append(Violation("unknown-symbol", state=q, symbol=s, detail=f"written symbol {rule.write!r} not in alphabet"))
        if not (0 <= rule.next_state < m.state_count):
            out.append(Violation("bad-state-id", state=q, symbol=s, detail=f"next state {rule.next_state} out of range"))

    for q, succs in m.branches.items():
        if not (0 <= q < m.state_count):
            out.append(Violation("bad-state-id", state=q, detail="branch state out of range"))
        if len(succs) < 2:
            out.append(Violation("short-branch", state=q, detail="branch list needs length > 1"))
        for t in succs:
            if not (0 <= t < m.state_count):
                out.append(Violation("bad-state-id", state=q, detail=f"branch target {t} out of range"))
    return out


# ---------------------------------------------------------------------------
# machine file format
#
#   machine <name>              (optional; defaults to "machine")
#   states <count>
#   alphabet <sym> <sym> ...    (must include 0)
#   det <q> <s> move L|R <q'>
#   det <q> <s> write <s'> <q'>
#   nondet <q> <q1> <q2> [...]
#
# '#' starts a comment; blank lines are ignored.


def parse_machine(text: str) -> Machine:
    """Parse the line-oriented machine file format.

    Raises :class:`MachineFormatError` (with a line number) on syntax
    problems and on any normal-form violation, so a returned machine is
    always valid.
    """
    name = None
    state_count = None
    alphabet: Optional[tuple[str, ...]] = None
    rules: dict[tuple[int, str], DetRule] = {}
    branches: dict[int, tuple[int, ...]] = {}
    saw_anything = False

    def want_int(token, lineno, what):
        try:
            return int(token)
        except ValueError:
            raise MachineFormatError(f"{what} must be an integer, got {token!r}", lineno)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        saw_anything = True
        tokens = line.split()
        head = tokens[0]
        if head == "machine":
            if len(tokens) != 2:
                raise MachineFormatError("expected: machine <name>", lineno)
            if name is not None:
                raise MachineFormatError("duplicate machine line", lineno)
            name = tokens[1]
        elif head == "states":
            if len(tokens) != 2:
                raise MachineFormatError("expected: states <count>", lineno)
            if state_count is not None:
                raise MachineFormatError("duplicate states line", lineno)
            state_count = want_int(tokens[1], lineno, "state count")
            if state_count < 1:
                raise MachineFormatError("state count must be positive", lineno)
        elif head == "alphabet":
            if alphabet is not None:
                raise MachineFormatError("duplicate alphabet line", lineno)
            if len(tokens) < 2:
                raise MachineFormatError("alphabet needs at least one symbol", lineno)
            alphabet = tuple(tokens[1:])
            if BLANK not in alphabet:
                raise MachineFormatError(f"alphabet must include the blank symbol {BLANK!r}", lineno)
        elif head == "det":
            if state_count is None or alphabet is None:
                raise MachineFormatError("rules must come after states and alphabet lines", lineno)
            if len(tokens) != 6:
                raise MachineFormatError("expected: det <q> <s> move L|R <q'>  or  det <q> <s> write <s'> <q'>", lineno)
            q = want_int(tokens[1], lineno, "state")
            s = tokens[2]
            action, arg = tokens[3], tokens[4]
            q2 = want_int(tokens[5], lineno, "next state")
            if (q, s) in rules:
                raise MachineFormatError(f"duplicate rule for state {q} symbol {s!r}", lineno)
            if action == "move":
                if arg not in ("L", "R"):
                    raise MachineFormatError("move direction must be L or R", lineno)
                rules[(q, s)] = DetRule(next_state=q2, move=LEFT if arg == "L" else RIGHT)
            elif action == "write":
                rules[(q, s)] = DetRule(next_state=q2, write=arg)
            else:
                raise MachineFormatError(f"unknown action {action!r} (want move/write)", lineno)
        elif head == "nondet":
            if state_count is None or alphabet is None:
                raise MachineFormatError("rules must come after states and alphabet lines", lineno)
            if len(tokens) < 4:
                raise MachineFormatError("expected: nondet <q> <q1> <q2> [...] with at least two successors", lineno)
            q = want_int(tokens[1], lineno, "state")
            if q in branches:
                raise MachineFormatError(f"duplicate nondet line for state {q}", lineno)
            branches[q] = tuple(want_int(t, lineno, "successor state") for t in tokens[2:])
        else:
            raise MachineFormatError(f"unknown directive {head!r}", lineno)

    if not saw_anything:
        raise MachineFormatError("empty machine description", 1)
    if state_count is None:
        raise MachineFormatError("missing states line", 1)
    if alphabet is None:
        raise MachineFormatError("missing alphabet line", 1)

    m = Machine(name=name or "machine", state_count=state_count, alphabet=alphabet,
                rules=rules, branches=branches)
    violations = validate_normal_form(m)
    if violations:
        raise MachineFormatError("; ".join(str(v) for v in violations))
    return m


def machine_to_text(m: Machine) -> str:
    """Serialize a machine back into the file format."""
    lines = [f"machine {m.name}", f"states {m.state_count}", "alphabet " + " ".join(m.alphabet)]
    for (q, s), rule in sorted(m.rules.items()):
        if rule.move is not None:
            lines.append(f"det {q} {s} move {'L' if rule.move == LEFT else 'R'} {rule.next_state}")
        else:
            lines.append(f"det {q} {s} write {rule.write} {rule.next_state}")
    for q, succs in sorted(m.branches.items()):
        lines.append(f"nondet {q} " + " ".join(str(t) for t in succs))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# configurations and single steps


@dataclass(frozen=True)
class Configuration:
    """Machine state, head cell (>= 1), and sparse tape (blank elsewhere)."""

    state: int
    head: int
    tape: dict[int, str] = field(default_factory=dict)

    def read(self, cell: int) -> str:
        return self.tape.get(cell, BLANK)

    def scanned(self) -> str:
        return self.read(self.head)


class HaltReason(enum.Enum):
    ACCEPTING_EXIT = "accepting-exit"   # left-move attempt from cell 1 in state 1
    LEFT_EDGE = "left-edge"             # same attempt in any other state
    NO_RULE = "no-rule"                 # no applicable rule


@dataclass(frozen=True)
class Halt:
    reason: HaltReason

    @property
    def accepting(self) -> bool:
        return self.reason is HaltReason.ACCEPTING_EXIT


def initial_configuration(m: Machine, w: str) -> Configuration:
    for s in w:
        if s not in m.alphabet:
            raise ValueError(f"input symbol {s!r} not in machine alphabet")
    tape = {i + 1: s for i, s in enumerate(w)}
    return Configuration(state=0, head=1, tape=tape)


def step(m: Machine, c: Configuration, choice: Optional[int] = None) -> Union[Configuration, Halt]:
    """Apply exactly one rule to ``c``.

    ``choice`` must be given iff ``c.state`` is nondeterministic, and then
    indexes that state's branch list.
    """
    if m.is_branch_state(c.state):
        succs = m.branches[c.state]
        if choice is None:
            raise ValueError(f"state {c.state} is nondeterministic; a branch choice is required")
        if not (0 <= choice < len(succs)):
            raise ValueError(f"branch choice {choice} out of range for state {c.state}")
        return Configuration(state=succs[choice], head=c.head, tape=c.tape)

    if choice is not None:
        raise ValueError(f"state {c.state} is deterministic; no choice expected")
    rule = m.rule_for(c.state, c.scanned())
    if rule is None:
        return Halt(HaltReason.NO_RULE)
    if rule.move is not None:
        if rule.move == LEFT and c.head == 1:
            return Halt(HaltReason.ACCEPTING_EXIT if c.state == 1 else HaltReason.LEFT_EDGE)
        return Configuration(state=rule.next_state, head=c.head + rule.move, tape=c.tape)
    tape = dict(c.tape)
    tape[c.head] = rule.write
    return Configuration(state=rule.next_state, head=c.head, tape=tape)


# ---------------------------------------------------------------------------
# traces


class Outcome(enum.Enum):
    ACCEPTED = "accepted"
    HALTED_REJECTING = "halted-rejecting"
    TIME_BOUND_EXCEEDED = "time-bound-exceeded"


@dataclass(frozen=True)
class TraceStep:
    """One applied rule: the configuration it was applied to, plus what ran."""

    before: Configuration
    action: Union[DetRule, int]  # DetRule, or the branch choice index

    @property
    def choice(self) -> Optional[int]:
        return self.action if isinstance(self.action, int) else None


@dataclass(frozen=True)
class ResourceUsage:
    time: int   # rules applied, including the final halting move attempt
    space: int  # distinct cells visited


@dataclass(frozen=True)
class Trace:
    input: str
    steps: tuple[TraceStep, ...]
    outcome: Outcome
    halt: Optional[Halt]
    final: Configuration  # configuration at the moment the run stopped
    usage: ResourceUsage

    @property
    def choices(self) -> tuple[int, ...]:
        return tuple(s.action for s in self.steps if isinstance(s.action, int))


ChoiceSource = Union[Sequence[int], Callable[[int, tuple[int, ...]], int]]


def run_with_choices(m: Machine, w: str, choices: ChoiceSource, max_time: int) -> Trace:
    """Run one computation, resolving nondeterminism from ``choices``.

    ``choices`` is either a sequence of branch indices consumed in order, or
    a callable ``(state, successors) -> index``.  Replaying a witness
    trace's ``choices`` reproduces it exactly.
    """
    if callable(choices):
        pick = choices
    else:
        it = iter(choices)

        def pick(state, succs):
            try:
                return next(it)
            except StopIteration:
                raise ValueError("choice sequence exhausted at a nondeterministic state") from None

    config = initial_configuration(m, w)
    steps: list[TraceStep] = []
    visited = {config.head}
    outcome = Outcome.TIME_BOUND_EXCEEDED
    halt = None
    for _ in range(max_time):
        if m.is_branch_state(config.state):
            choice = pick(config.state, m.branches[config.state])
            nxt = step(m, config, choice)
            steps.append(TraceStep(before=config, action=choice))
        else:
            rule = m.rule_for(config.state, config.scanned())
            if rule is None:
                outcome = Outcome.HALTED_REJECTING
                halt = Halt(HaltReason.NO_RULE)
                break
            nxt = step(m, config)
            steps.append(TraceStep(before=config, action=rule))
        if isinstance(nxt, Halt):
            halt = nxt
            outcome = Outcome.ACCEPTED if nxt.accepting else Outcome.HALTED_REJECTING
            break
        config = nxt
        visited.add(config.head)
    else:
        # Bound exhausted.  A stuck state is still a halt: running out of
        # rules costs no step, so it must be observable at the bound too.
        if not m.is_branch_state(config.state) and m.rule_for(config.state, config.scanned()) is None:
            outcome = Outcome.HALTED_REJECTING
            halt = Halt(HaltReason.NO_RULE)
    # A NO_RULE halt applies no rule, so it adds no step; move attempts do.
    usage = ResourceUsage(time=len(steps), space=len(visited))
    return Trace(input=w, steps=tuple(steps), outcome=outcome, halt=halt,
                 final=config, usage=usage)


@dataclass(frozen=True)
class DirectResult:
    accepted: bool
    witness: Optional[Trace]
    usage: Optional[ResourceUsage]
    explored: int


def run_direct(m: Machine, w: str, max_time: int, node_cap: int = DEFAULT_NODE_CAP) -> DirectResult:
    """Exhaustive bounded search over nondeterministic choice sequences.

    Accepts iff some computation of at most ``max_time`` applied rules
    accepts.  The witness is a minimum-time accepting trace; ties are
    broken by the lexicographically smallest branch-choice sequence
    (iterative deepening with choices tried in ascending order guarantees
    both).  Raises :class:`ResourceCapExceeded` when more than ``node_cap``
    rule applications would be explored.
    """
    if max_time < 0:
        raise ValueError("max_time must be >= 0")
    init = initial_configuration(m, w)
    explored = 0

    def dfs(config: Configuration, remaining: int, prefix: list[int]) -> Optional[list[int]]:
        nonlocal explored
        if remaining == 0:
            return None
        explored += 1
        if explored > node_cap:
            raise ResourceCapExceeded(f"direct search exceeded node cap {node_cap}")
        if m.is_branch_state(config.state):
            for idx in range(len(m.branches[config.state])):
                prefix.append(idx)
                nxt = step(m, config, idx)
                assert isinstance(nxt, Configuration)
                found = dfs(nxt, remaining - 1, prefix)
                if found is not None:
                    return found
                prefix.pop()
            return None
        nxt = step(m, config)
        if isinstance(nxt, Halt):
            return list(prefix) if nxt.accepting else None
        return dfs(nxt, remaining - 1, prefix)

    for bound in range(max_time + 1):
        found = dfs(init, bound, []) if bound > 0 else None
        if found is not None:
            witness = run_with_choices(m, w, found, bound)
            assert witness.outcome is Outcome.ACCEPTED
            return DirectResult(accepted=True, witness=witness, usage=witness.usage, explored=explored)
    return DirectResult(accepted=False, witness=None, usage=None, explored=explored)


# ---------------------------------------------------------------------------
# general (conventional) machines and normalization
#
# A general machine is a conventional single-tape NTM: a transition may
# write and move in the same step, may stay put ("S"), and a (state,
# symbol) pair may carry several alternative transitions.  It accepts the
# moment it enters any accepting state.

STAY = 0


@dataclass(frozen=True)
class GeneralRule:
    write: str
    move: int  # LEFT, STAY, RIGHT
    next_state: int


@dataclass(frozen=True)
class GeneralMachine:
    name: str
    state_count: int
    alphabet: tuple[str, ...]
    accepting: frozenset[int]
    rules: dict[tuple[int, str], tuple[GeneralRule, ...]] = field(default_factory=dict)


def parse_general_machine(text: str) -> GeneralMachine:
    """Parse the general-machine file format.

    Layout mirrors the normal format::

        general <name>
        states <count>
        alphabet 0 a b
        accept <q> [...]
        rule <q> <s> <s'> L|R|S <q'>     # may repeat (q, s) for branching
    """
    name = None
    state_count = None
    alphabet = None
    accepting: Optional[frozenset[int]] = None
    rules: dict[tuple[int, str], list[GeneralRule]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "general":
            name = tokens[1] if len(tokens) == 2 else None
            if name is None:
                raise MachineFormatError("expected: general <name>", lineno)
        elif head == "states":
            state_count = int(tokens[1])
        elif head == "alphabet":
            alphabet = tuple(tokens[1:])
        elif head == "accept":
            accepting = frozenset(int(t) for t in tokens[1:])
        elif head == "rule":
            if len(tokens) != 6:
                raise MachineFormatError("expected: rule <q> <s> <s'> L|R|S <q'>", lineno)
            q, s, w_, d, q2 = int(tokens[1]), tokens[2], tokens[3], tokens[4], int(tokens[5])
            if d not in ("L", "R", "S"):
                raise MachineFormatError("direction must be L, R or S", lineno)
            move = {"L": LEFT, "R": RIGHT, "S": STAY}[d]
            rules.setdefault((q, s), []).append(GeneralRule(write=w_, move=move, next_state=q2))
        else:
            raise MachineFormatError(f"unknown directive {head!r}", lineno)

    if state_count is None or alphabet is None or accepting is None:
        raise MachineFormatError("general machine needs states, alphabet and accept lines", 1)
    if BLANK not in alphabet:
        raise MachineFormatError(f"alphabet must include the blank symbol {BLANK!r}", 1)
    g = GeneralMachine(name=name or "general", state_count=state_count, alphabet=alphabet,
                       accepting=accepting, rules={k: tuple(v) for k, v in rules.items()})
    for (q, s), alts in g.rules.items():
        if not (0 <= q < state_count):
            raise MachineFormatError(f"rule state {q} out of range")
        if s not in alphabet:
            raise MachineFormatError(f"rule symbol {s!r} not in alphabet")
        for r in alts:
            if r.write not in alphabet:
                raise MachineFormatError(f"written symbol {r.write!r} not in alphabet")
            if not (0 <= r.next_state < state_count):
                raise MachineFormatError(f"next state {r.next_state} out of range")
    return g


def run_direct_general(g: GeneralMachine, w: str, max_time: int,
                       node_cap: int = DEFAULT_NODE_CAP) -> DirectResult:
    """Bounded exhaustive search for general machines.

    Accepts iff some computation enters an accepting state within
    ``max_time`` transitions.  Used as the independent oracle when testing
    :func:`normalize`.
    """
    for s in w:
        if s not in g.alphabet:
            raise ValueError(f"input symbol {s!r} not in machine alphabet")
    explored = 0

    def dfs(state, head, tape, remaining) -> bool:
        nonlocal explored
        if state in g.accepting:
            return True
        if remaining == 0:
            return False
        alts = g.rules.get((state, tape.get(head, BLANK)), ())
        for r in alts:
            explored += 1
            if explored > node_cap:
                raise ResourceCapExceeded(f"general search exceeded node cap {node_cap}")
            new_head = head + r.move
            if new_head < 1:
                continue  # falling off the left edge kills this computation
            old = tape.get(head)
            tape[head] = r.write
            if dfs(r.next_state, new_head, tape, remaining - 1):
                return True
            if old is None:
                del tape[head]
            else:
                tape[head] = old
        return False

    for bound in range(max_time + 1):
        tape = {i + 1: s for i, s in enumerate(w)}
        if dfs(0, 1, tape, bound):
            return DirectResult(accepted=True, witness=None, usage=None, explored=explored)
    return DirectResult(accepted=False, witness=None, usage=None, explored=explored)


@dataclass(frozen=True)
class NormalizeResult:
    """Normalized machine plus the time blow-up it introduces.

    If the general machine accepts within ``t`` transitions, the normalized
    machine accepts within ``step_blowup * t + step_overhead`` applied
    rules, and conversely every accepting normalized run projects back to
    an accepting general run.
    """

    machine: Machine
    step_blowup: int
    step_overhead: int
    state_map: dict[int, int]


def normalize(g: GeneralMachine, state_cap: int = 10_000) -> NormalizeResult:
    """Compile a general machine into an equivalent normal-form machine.

    Write-and-move transitions split into write-then-move via fresh
    states; per-symbol branching splits into an identity write followed by
    a pure-choice state; acceptance becomes "reach state 1, sweep left,
    exit cell 1".  A general state whose transitions already look like a
    pure normal-form action maps one-to-one.
    """
    if BLANK not in g.alphabet:
        raise ValueError(f"general machine alphabet lacks the blank symbol {BLANK!r}")

    # Accepting states collapse onto normal state 1; their outgoing rules
    # are dead (a general machine accepts on entry).
    state_map: dict[int, int] = {}
    next_id = 2
    for q in range(g.state_count):
        if q in g.accepting:
            state_map[q] = 1
        elif q == 0:
            state_map[q] = 0
        else:
            state_map[q] = next_id
            next_id += 1
    if 0 in g.accepting:
        # state 0 must still exist as the entry point; it funnels into 1 below
        state_map[0] = 0

    rules: dict[tuple[int, str], DetRule] = {}
    branches: dict[int, tuple[int, ...]] = {}
    fresh = [next_id]  # next unallocated state id
    max_cost = 1  # worst applied-rules count emitted for one general transition

    def alloc() -> int:
        q = fresh[0]
        if q >= state_cap:
            raise ValueError(f"normalization exceeded the state budget ({state_cap})")
        fresh[0] += 1
        return q

    def emit_apply(src: int, s: str, r: GeneralRule) -> int:
        """Rules taking ``src`` scanning ``s`` through one general transition.

        Returns the number of applied rules the simulated step costs.
        """
        target = state_map[r.next_state]
        if r.move == STAY:
            rules[(src, s)] = DetRule(next_state=target, write=r.write)
            return 1
        if r.write == s:
            rules[(src, s)] = DetRule(next_state=target, move=r.move)
            return 1
        mid = alloc()
        rules[(src, s)] = DetRule(next_state=mid, write=r.write)
        rules[(mid, r.write)] = DetRule(next_state=target, move=r.move)
        return 2

    def is_pure_choice(q: int) -> Optional[tuple[int, ...]]:
        """Detect a state that only picks among successors, uniformly over
        the whole alphabet, writing nothing and staying put."""
        succs = None
        for s in g.alphabet:
            alts = g.rules.get((q, s))
            if not alts or len(alts) < 2:
                return None
            sig = tuple(r.next_state for r in alts)
            if any(r.move != STAY or r.write != s for r in alts):
                return None
            if succs is None:
                succs = sig
            elif succs != sig:
                return None
        return succs

    for q in range(g.state_count):
        if q in g.accepting:
            continue
        mq = state_map[q]
        pure = is_pure_choice(q)
        if pure is not None:
            branches[mq] = tuple(state_map[t] for t in pure)
            max_cost = max(max_cost, 1)
            continue
        for s in g.alphabet:
            alts = g.rules.get((q, s))
            if not alts:
                continue
            if len(alts) == 1:
                max_cost = max(max_cost, emit_apply(mq, s, alts[0]))
            else:
                # identity write into a pure-choice state, then one chain per
                # alternative: 2 picks plus the chain's own 1-2 rules
                sel = alloc()
                rules[(mq, s)] = DetRule(next_state=sel, write=s)
                heads = []
                for r in alts:
                    c = alloc()
                    heads.append(c)
                    max_cost = max(max_cost, 2 + emit_apply(c, s, r))
                branches[sel] = tuple(heads)

    if 0 in g.accepting:
        # immediate acceptance: hop into the accept runner on any symbol
        for s in g.alphabet:
            rules[(0, s)] = DetRule(next_state=1, write=s)
        max_cost = max(max_cost, 1)

    # accept runner: sweep left in state 1 until the exit from cell 1
    for s in g.alphabet:
        rules.setdefault((1, s), DetRule(next_state=1, move=LEFT))

    state_count = max([fresh[0] - 1, 1] + [q for q in branches] + [q for (q, _s) in rules]
                      + [r.next_state for r in rules.values()]
                      + [t for succ in branches.values() for t in succ]) + 1
    machine = Machine(name=g.name + "_normal", state_count=state_count,
                      alphabet=g.alphabet, rules=rules, branches=branches)
    violations = validate_normal_form(machine)
    if violations:  # construction bug guard; should be unreachable
        raise AssertionError("normalize produced an invalid machine: " + "; ".join(map(str, violations)))
    # +1 covers the accept sweep (at most one move per visited cell plus the
    # final attempt); +2 covers acceptance at time zero (funnel write + exit).
    return NormalizeResult(machine=machine, step_blowup=max_cost + 1, step_overhead=2,
                           state_map=state_map)
