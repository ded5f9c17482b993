"""Guess-and-verify simulation: enumerate stories, check every block.

Given a machine, an input ``w`` and a scale ``n >= len(w)``, the simulator
looks for an accepting *story*: a claimed crossing history with some first
block length ``P``, at most ``max(2, n)`` phases, opened by ``(1,0,0,+1)``
and closed by the accepting exit ``(k,0,1,-1)``.  A story is verified by
checking each block's visits independently with the phase simulator, and
the whole run is charged against a shared budget of ``n**2`` simulated
machine steps, the same step counting the direct search uses.

The nondeterministic "guess a story" becomes a deterministic canonical
enumeration: first block lengths ascending, then phase counts ascending,
then stories ordered lexicographically by their phase-ordered descriptor
tuples ``(milestone, state, delta)``.  The search prunes story prefixes
whose phases cannot be realized at all, which never changes which story is
found first, and the winner is re-verified through the block-by-block
pipeline to produce the reported result.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .block_check import check_block, initial_block_content
from .crossing import (
    Descriptor,
    History,
    MilestoneHistory,
    OPENER,
    Partition,
    StoryStructureError,
    block_story,
)
from .ntm_core import (
    BLANK,
    DEFAULT_NODE_CAP,
    LEFT,
    NodeBudget,
    RIGHT,
    Machine,
)
from .phase_sim import enumerate_block_runs


class InvalidStoryError(ValueError):
    """A story guess violates the story-shape invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def descriptor_constant(m: Machine) -> int:
    """Symbols needed to encode one story descriptor for this machine.

    Descriptors are laid out milestone by milestone in phase order, so only
    the state (digits of the largest state id) plus a direction sign and a
    separator need storing; the constant depends on the machine alone.
    """
    return len(str(m.state_count - 1)) + 2


@dataclass(frozen=True)
class StoryGuess:
    """One candidate ``(n, P, r, k, story)`` for the simulator to verify."""

    n: int
    P: int
    r: int
    k: int
    story: History

    def closer(self) -> Descriptor:
        return Descriptor(phase=self.k, milestone=0, state=1, delta=LEFT)

    def descriptor_count(self) -> int:
        return sum(len(h.entries) for h in self.story.milestones)

    def violations(self, m: Optional[Machine] = None) -> list[str]:
        # Note: the story search only enumerates k up to max(2, n); larger
        # stories are still *verifiable* (crossing histories of slow runs
        # have more phases), so no upper bound is enforced here.
        out = []
        if self.n < 1:
            out.append("scale n must be >= 1")
        if not (1 <= self.P <= self.n):
            out.append(f"first block length P={self.P} must lie in 1..{self.n}")
        if self.k < 2:
            out.append(f"an accepting story has at least 2 phases, got k={self.k}")
        if not (1 <= self.r <= max(1, self.k - 1)):
            out.append(f"visited-block count r={self.r} must lie in 1..{max(1, self.k - 1)}")
        part = self.story.partition
        if (part.P, part.n, part.r) != (self.P, self.n, self.r):
            out.append("story partition disagrees with the guessed (P, n, r)")
            return out
        if len(self.story.milestones) != self.r + 2:
            out.append(f"story must carry milestone lists S_0..S_{self.r + 1}")
            return out
        s0 = self.story.milestone(0).entries
        if s0 != (OPENER, self.closer()):
            out.append(f"accepting story must have S_0 = ({OPENER.astuple()}, {self.closer().astuple()})")
        if self.story.milestone(self.r + 1).entries:
            out.append(f"S_{self.r + 1} must be empty")
        count = self.descriptor_count()
        if count > 2 * self.k:
            out.append(f"story carries {count} descriptors, more than 2k = {2 * self.k}")
        for h in self.story.milestones:
            for d in h.entries:
                if not (1 <= d.phase <= self.k):
                    out.append(f"descriptor {d.astuple()} has phase outside 1..k")
                if not (0 <= d.milestone <= self.r):
                    out.append(f"descriptor {d.astuple()} names milestone outside 0..r")
                if d.delta not in (LEFT, RIGHT):
                    out.append(f"descriptor {d.astuple()} has direction outside -1/+1")
                if m is not None and not (0 <= d.state < m.state_count):
                    out.append(f"descriptor {d.astuple()} names state outside the machine")
        return out


@dataclass(frozen=True)
class MStarResult:
    accepted: bool
    winning: Optional[StoryGuess]
    sim_time: Optional[int]          # guess cost + per-call overhead + phase steps
    sim_space: Optional[int]         # max(block window incl. sentinels, story size)
    descriptor_constant: int
    wall_stats: int                  # search effort: story prefixes examined
    budget: int
    phase_steps: Optional[int] = None
    guess_cost: Optional[int] = None
    overhead_steps: Optional[int] = None
    story_size: Optional[int] = None
    witness_choices: tuple[tuple[int, ...], ...] = ()   # per phase, phases 1..k-1
    failed_block: Optional[int] = None
    structure_error: Optional[str] = None
    budget_exhausted: bool = False


def story_from_history(history: History) -> StoryGuess:
    """Repackage an extracted accepting history as a verifiable story.

    Trims the spare blocks a replay partition materializes down to the
    blocks actually visited, and reads ``k`` off the closing descriptor.
    Raises :class:`InvalidStoryError` when the history does not end in the
    accepting exit.
    """
    part = history.partition
    n = part.n
    h0 = history.milestone(0).entries
    if len(h0) != 2 or h0[0] != OPENER or h0[1].state != 1 or h0[1].delta != LEFT:
        raise InvalidStoryError(["history does not close with the accepting exit"])
    k = h0[1].phase
    crossed = [h.milestone for h in history.milestones if h.milestone >= 1 and h.entries]
    r = max(crossed) + 1 if crossed else 1
    milestones = tuple(
        MilestoneHistory(milestone=j, entries=history.milestones[j].entries if j < len(history.milestones) else ())
        for j in range(r + 2))
    story = History(partition=Partition(P=part.P, n=n, r=r), milestones=milestones, guessed=True)
    return StoryGuess(n=n, P=part.P, r=r, k=k, story=story)


def _guess_cost(guess: StoryGuess, c: int) -> int:
    digits = len(str(guess.n * guess.n)) + len(str(guess.P)) + len(str(guess.r)) + len(str(guess.k))
    return digits + c * guess.descriptor_count()


def _accounting(m: Machine, guess: StoryGuess, phase_steps: int) -> dict:
    c = descriptor_constant(m)
    story_size = c * guess.descriptor_count()
    window = max(guess.story.partition.block_length(j) for j in range(1, guess.r + 1)) + 2
    overhead = guess.r + guess.k
    cost = _guess_cost(guess, c)
    return dict(
        sim_time=cost + overhead + phase_steps,
        sim_space=max(window, story_size),
        phase_steps=phase_steps,
        guess_cost=cost,
        overhead_steps=overhead,
        story_size=story_size,
        descriptor_constant=c,
    )


def verify_story(m: Machine, w: str, guess: StoryGuess, budget: Optional[int] = None,
                 node_cap: int = DEFAULT_NODE_CAP) -> MStarResult:
    """Check one story by verifying each of its blocks independently.

    All blocks share one cumulative budget of simulated machine steps
    (default ``n**2``).  Accepts iff every block's visit chain can be
    realized within it; the result carries the time/space accounting of
    the accepting branch.
    """
    problems = guess.violations(m)
    if problems:
        raise InvalidStoryError(problems)
    if budget is None:
        budget = guess.n * guess.n
    if budget < 0:
        raise ValueError("budget must be >= 0")
    c = descriptor_constant(m)
    partition = guess.story.partition
    work = NodeBudget(node_cap, "story verification")

    total_steps = 0
    choices_by_phase: dict[int, tuple[int, ...]] = {}
    for j in range(1, guess.r + 1):
        try:
            bs = block_story(guess.story, j)
        except StoryStructureError as err:
            return MStarResult(accepted=False, winning=None, sim_time=None, sim_space=None,
                               descriptor_constant=c, wall_stats=1, budget=budget,
                               failed_block=j, structure_error=str(err))
        x0 = initial_block_content(j, partition, w)
        results = check_block(m, bs, x0, budget - total_steps, work=work)
        best = None
        for res in results:
            if res.accepted and (best is None or res.steps_consumed < best.steps_consumed):
                best = res
        if best is None:
            return MStarResult(accepted=False, winning=None, sim_time=None, sim_space=None,
                               descriptor_constant=c, wall_stats=1, budget=budget,
                               failed_block=j,
                               budget_exhausted=any(r.budget_exhausted for r in results))
        total_steps += best.steps_consumed
        for (d_in, _d_out), picks in zip(bs.pairs(), best.choices_per_visit):
            choices_by_phase[d_in.phase] = picks

    witness = tuple(choices_by_phase.get(p, ()) for p in range(1, guess.k))
    return MStarResult(accepted=True, winning=guess, wall_stats=1, budget=budget,
                       witness_choices=witness, **_accounting(m, guess, total_steps))


# ---------------------------------------------------------------------------
# the implication chain behind story verification


@dataclass(frozen=True)
class Implication:
    """``S_j^+ and S_{j+1}^- imply S_j^- and S_{j+1}^+`` for one ``j``."""

    index: int
    antecedent: tuple[str, str]
    succedent: tuple[str, str]
    holds: bool


@dataclass(frozen=True)
class ChainReport:
    implications: tuple[Implication, ...]
    occurrence_ok: bool   # every interior side occurs once per role
    reduced: str
    sound: bool


def implication_chain(guess: StoryGuess, block_verdicts: list[bool]) -> ChainReport:
    """Materialize the elimination chain that block verdicts feed.

    Implication ``j`` (0-based, ``j = 0..r``) is established by checking
    block ``j+1``; the last one is vacuous because milestone ``r+1`` has no
    crossings.  When every verdict holds, eliminating each interior
    ``S_j^+``/``S_j^-`` pair reduces the chain to ``S_0^+ -> S_0^-``: the
    opening crossing is true by definition, so the accepting exit is
    realizable.
    """
    r = guess.r
    if len(block_verdicts) != r:
        raise ValueError(f"expected {r} block verdicts, got {len(block_verdicts)}")
    implications = []
    for j in range(r + 1):
        holds = block_verdicts[j] if j < r else True
        implications.append(Implication(
            index=j,
            antecedent=(f"S_{j}^+", f"S_{j + 1}^-"),
            succedent=(f"S_{j}^-", f"S_{j + 1}^+"),
            holds=holds,
        ))
    antecedents: dict[str, int] = {}
    succedents: dict[str, int] = {}
    for imp in implications:
        for name in imp.antecedent:
            antecedents[name] = antecedents.get(name, 0) + 1
        for name in imp.succedent:
            succedents[name] = succedents.get(name, 0) + 1
    occurrence_ok = all(
        antecedents.get(f"S_{j}^{sign}", 0) == 1 and succedents.get(f"S_{j}^{sign}", 0) == 1
        for j in range(1, r + 1) for sign in "+-")
    return ChainReport(
        implications=tuple(implications),
        occurrence_ok=occurrence_ok,
        reduced="S_0^+ -> S_0^-",
        sound=all(block_verdicts),
    )


# ---------------------------------------------------------------------------
# canonical story enumeration with realizability pruning


def _initial_content(j: int, P: int, n: int, w: str) -> str:
    if j == 1:
        chunk = w[:P]
        size = P
    elif j == 2:
        chunk = w[P:]
        size = n
    else:
        chunk = ""
        size = n
    return chunk + BLANK * (size - len(chunk))


@dataclass(frozen=True)
class _Entry:
    """One realizable way to reach the current story prefix."""

    contents: tuple[tuple[int, str], ...]   # touched blocks, sorted by index
    steps: int
    choices: tuple[tuple[int, ...], ...]    # per completed phase

    def content_of(self, j: int, P: int, n: int, w: str) -> str:
        for idx, text in self.contents:
            if idx == j:
                return text
        return _initial_content(j, P, n, w)

    def with_block(self, j: int, text: str, add_steps: int,
                   picks: tuple[int, ...]) -> "_Entry":
        items = dict(self.contents)
        items[j] = text
        return _Entry(contents=tuple(sorted(items.items())),
                      steps=self.steps + add_steps,
                      choices=self.choices + (picks,))


class _StorySearch:
    def __init__(self, m: Machine, w: str, n: int, budget: int, node_cap: int):
        self.m = m
        self.w = w
        self.n = n
        self.budget = budget
        self.work = NodeBudget(node_cap, "story search")
        self.prefixes = 0

    def _stops(self, entry: _Entry, d_in: Descriptor, block: int, P: int):
        self.work.charge()
        content = entry.content_of(block, P, self.n, self.w)
        cap = self.budget - entry.steps
        if cap < 1:
            return []
        return [stop for stop in enumerate_block_runs(
                    self.m, d_in.state, d_in.delta, content, cap,
                    left_is_edge=(block == 1), work=self.work)
                if stop.kind == "exit"]

    def find(self, P: int, k: int) -> Optional[tuple[list[Descriptor], _Entry]]:
        """Lexicographically first realizable story for ``(P, k)``."""
        start = _Entry(contents=(), steps=0, choices=())
        return self._dfs(P, k, phase=1, block=1, d_in=OPENER,
                         frontier=[start], prefix=[])

    def _dfs(self, P, k, phase, block, d_in, frontier, prefix):
        self.prefixes += 1
        closing = phase == k - 1
        # run the current phase from every reachable content state and group
        # the exits by the crossing descriptor they would realize
        grouped: dict[tuple[int, int, int], list[tuple]] = {}
        for entry in frontier:
            for stop in self._stops(entry, d_in, block, P):
                if stop.delta == LEFT and block == 1:
                    # tape edge: only the accepting closer may use it
                    if closing and stop.state == 1:
                        key = (0, 1, LEFT)
                    else:
                        continue
                elif stop.delta == LEFT:
                    key = (block - 1, stop.state, LEFT)
                else:
                    key = (block, stop.state, RIGHT)
                grouped.setdefault(key, []).append((entry, stop))

        if closing:
            hits = grouped.get((0, 1, LEFT))
            if block != 1 or not hits:
                return None
            closer = Descriptor(phase=k, milestone=0, state=1, delta=LEFT)
            best = min(hits, key=lambda es: (es[0].steps + es[1].steps,
                                             es[0].choices + (es[1].choices,)))
            entry, stop = best
            final = entry.with_block(block, stop.content, stop.steps, stop.choices)
            return (prefix + [closer], final)

        for key in sorted(grouped):
            milestone, state, delta = key
            if milestone == 0:
                continue  # interior phases may not use the tape edge
            nxt = Descriptor(phase=phase + 1, milestone=milestone, state=state, delta=delta)
            merged: dict[tuple, _Entry] = {}
            for entry, stop in grouped[key]:
                cand = entry.with_block(block, stop.content, stop.steps, stop.choices)
                prev = merged.get(cand.contents)
                if prev is None or (cand.steps, cand.choices) < (prev.steps, prev.choices):
                    merged[cand.contents] = cand
            found = self._dfs(P, k, phase + 1, block + delta, nxt,
                              list(merged.values()), prefix + [nxt])
            if found is not None:
                return found
        return None


def _story_from_descriptors(n: int, P: int, k: int,
                            descriptors: list[Descriptor]) -> StoryGuess:
    blocks = [1]
    for d in descriptors[:-1]:
        blocks.append(blocks[-1] + 1 if d.delta == RIGHT else blocks[-1] - 1)
    r = max(blocks)
    per: dict[int, list[Descriptor]] = {j: [] for j in range(r + 2)}
    per[0].append(OPENER)
    for d in descriptors:
        per[d.milestone].append(d)
    milestones = tuple(MilestoneHistory(milestone=j, entries=tuple(per[j]))
                       for j in range(r + 2))
    story = History(partition=Partition(P=P, n=n, r=r), milestones=milestones, guessed=True)
    return StoryGuess(n=n, P=P, r=r, k=k, story=story)


def simulate_mstar(m: Machine, w: str, n: int, budget: Optional[int] = None,
                   max_phases: Optional[int] = None,
                   node_cap: int = DEFAULT_NODE_CAP) -> MStarResult:
    """Search the story space and verify the first candidate that fits.

    Equivalent, by construction, to asking whether the direct bounded
    search accepts within ``n**2`` steps using at most ``max(2, n)`` phases
    under some first-block length: the enumeration is pruned by phase
    realizability, which cannot skip a verifiable story.  Raises
    :class:`ResourceCapExceeded` when the search effort passes ``node_cap``.
    """
    if n < 1:
        raise ValueError("scale n must be >= 1")
    if len(w) > n:
        raise ValueError(f"scale n must be at least the input length ({len(w)})")
    for s in w:
        if s not in m.alphabet:
            raise ValueError(f"input symbol {s!r} not in machine alphabet")
    if budget is None:
        budget = n * n
    kmax = max_phases if max_phases is not None else max(2, n)

    search = _StorySearch(m, w, n, budget, node_cap)
    for P in range(1, n + 1):
        for k in range(2, kmax + 1):
            found = search.find(P, k)
            if found is None:
                continue
            descriptors, entry = found
            guess = _story_from_descriptors(n, P, k, descriptors)
            result = verify_story(m, w, guess, budget, node_cap=node_cap)
            assert result.accepted, "search found a story the verifier rejects"
            assert result.phase_steps == entry.steps, \
                "search and verifier disagree on the cheapest realization"
            return replace(result, wall_stats=search.prefixes)
    return MStarResult(accepted=False, winning=None, sim_time=None, sim_space=None,
                       descriptor_constant=descriptor_constant(m),
                       wall_stats=search.prefixes, budget=budget)
