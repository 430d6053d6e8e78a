"""Team placement solvers.

Three routes to a deployment, all driven by the packed coverage rows:

* an exact depth-first implicit enumeration over per-site team subsets,
  pruned by admissible per-type bounds (the residual value of everything
  the remaining sites could still cover, and the sum of the largest
  remaining single-site gains the fleet and base budget still allow);
* a deterministic greedy constructor that repeatedly takes the placement
  with the largest marginal covered demand;
* best-improvement local search over two move classes: relocate a single
  team, or swap an open base for a closed site moving all its teams.

The same engine also maximizes the weighted bi-objective score (coverage
rate vs. base-reduction rate) by pricing every base opening, and a
count-based variant handles the reliability mode where a demand needs
``b`` covering teams of a type before it counts as covered.

Everything is deterministic: branch children are ordered by gain and ties
are broken by lowest site index, then lowest type index.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .coverage import CoverMatrix, CoverageReport, evaluate_deployment
from .errors import DeploymentError, GuardError, ValidationError
from .instance import Deployment, Instance, check_deployment

MODES = ("auto", "exact", "greedy", "greedy-ls")
_TOL = 1e-12


@dataclass(frozen=True)
class SolveOptions:
    """Solver configuration.

    ``fixed_bases`` freezes the open-base set: exactly those sites are open
    and only they may host teams. ``fixed_placements`` pins (site, type)
    pairs in place while the remaining fleet is optimized around them.
    """

    mode: str = "auto"
    exact_site_limit: int = 25
    fixed_bases: frozenset[str] | None = None
    fixed_placements: frozenset[tuple[str, str]] | None = None
    time_limit_s: float | None = None

    def normalized_mode(self) -> str:
        mode = {"greedy+local-search": "greedy-ls"}.get(self.mode, self.mode)
        if mode not in MODES:
            raise ValidationError(f"unknown solve mode {self.mode!r}; expected one of {MODES}")
        return mode


@dataclass
class SolveResult:
    deployment: Deployment
    report: CoverageReport
    proof: str  # optimal | heuristic | time-limit
    explored_nodes: int = 0
    wall_time_s: float = 0.0


class _TimeUp(Exception):
    pass


class _Ctx:
    """Instance compiled to index space plus resolved solve options."""

    def __init__(self, instance: Instance, cover: CoverMatrix, options: SolveOptions,
                 need: Sequence[int] | None = None):
        self.instance = instance
        self.cover = cover
        self.q = instance.demand_matrix
        self.words = cover.words
        self.n_types, self.n_demands = self.q.shape
        self.n_sites = instance.n_sites
        self.fleet = np.array([t.fleet_size for t in instance.team_types], dtype=np.int64)
        self.capacity = np.array([s.capacity for s in instance.sites], dtype=np.int64)
        self.max_bases = instance.max_bases
        self.need = np.ones(self.n_types, dtype=np.int64) if need is None else np.asarray(need, dtype=np.int64)
        if (self.need < 1).any():
            raise ValidationError("required covering-team counts must be >= 1")

        if options.fixed_bases is not None:
            idx = set()
            for site in options.fixed_bases:
                if site not in instance.site_index:
                    raise ValidationError(f"fixed base {site!r} is not a candidate site")
                idx.add(instance.site_index[site])
            if len(idx) > self.max_bases:
                raise ValidationError(
                    f"{len(idx)} fixed bases exceed the base budget {self.max_bases}"
                )
            self.frozen_bases: set[int] | None = idx
        else:
            self.frozen_bases = None

        self.frozen_placements: set[tuple[int, int]] = set()
        for site, type_id in options.fixed_placements or ():
            if site not in instance.site_index:
                raise ValidationError(f"fixed placement site {site!r} is not a candidate site")
            if type_id not in instance.type_index:
                raise ValidationError(f"fixed placement type {type_id!r} is not a team type")
            self.frozen_placements.add((instance.site_index[site], instance.type_index[type_id]))

        self.allowed = np.ones(self.n_sites, dtype=bool)
        if self.frozen_bases is not None:
            self.allowed[:] = False
            self.allowed[list(self.frozen_bases)] = True
        for j, _u in self.frozen_placements:
            if not self.allowed[j]:
                raise ValidationError(
                    f"fixed placement at {instance.site_ids[j]} lies outside the fixed base set"
                )

    def searchable_sites(self) -> int:
        return int(self.allowed.sum())


class _State:
    """Mutable solver state: placements, per-type coverage, open set."""

    def __init__(self, ctx: _Ctx):
        self.ctx = ctx
        self.placements: set[tuple[int, int]] = set()
        self.load = np.zeros(ctx.n_sites, dtype=np.int64)
        self.rem_fleet = ctx.fleet.copy()
        self.open: set[int] = set(ctx.frozen_bases) if ctx.frozen_bases is not None else set()
        self.uses_counts = bool((ctx.need > 1).any())
        if self.uses_counts:
            self.counts = [np.zeros(ctx.n_demands, dtype=np.int32) for _ in range(ctx.n_types)]
        else:
            self.covered = [
                np.zeros(kernels.n_words(ctx.n_demands), dtype=np.uint64) for _ in range(ctx.n_types)
            ]
        self.type_value = np.zeros(ctx.n_types, dtype=np.int64)
        for j, u in sorted(ctx.frozen_placements):
            self.add(j, u)

    def add(self, j: int, u: int) -> None:
        ctx = self.ctx
        if (j, u) in self.placements:
            raise DeploymentError(
                f"duplicate placement ({ctx.instance.site_ids[j]}, {ctx.instance.type_ids[u]})"
            )
        self.placements.add((j, u))
        self.load[j] += 1
        self.rem_fleet[u] -= 1
        if self.load[j] > ctx.capacity[j]:
            raise DeploymentError(f"site {ctx.instance.site_ids[j]} over capacity")
        if self.rem_fleet[u] < 0:
            raise DeploymentError(f"team type {ctx.instance.type_ids[u]} over fleet size")
        self.open.add(j)
        if ctx.frozen_bases is None and len(self.open) > ctx.max_bases:
            raise DeploymentError("base budget exceeded")
        row = ctx.words[u, j]
        if self.uses_counts:
            kernels.update_counts(self.counts[u], row, 1)
            self.type_value[u] = kernels.counts_value(self.counts[u], ctx.q[u], ctx.need[u])
        else:
            self.covered[u] |= row
            self.type_value[u] = kernels.mask_value(self.covered[u], ctx.q[u])

    def remove(self, j: int, u: int) -> None:
        ctx = self.ctx
        self.placements.discard((j, u))
        self.load[j] -= 1
        self.rem_fleet[u] += 1
        if self.load[j] == 0 and (ctx.frozen_bases is None or j not in ctx.frozen_bases):
            self.open.discard(j)
        row = ctx.words[u, j]
        if self.uses_counts:
            kernels.update_counts(self.counts[u], row, -1)
            self.type_value[u] = kernels.counts_value(self.counts[u], ctx.q[u], ctx.need[u])
        else:
            rows = np.array(sorted(jj for jj, uu in self.placements if uu == u), dtype=np.int64)
            self.covered[u] = kernels.union_rows(ctx.words[u], rows)
            self.type_value[u] = kernels.mask_value(self.covered[u], ctx.q[u])

    @property
    def value(self) -> int:
        return int(self.type_value.sum())

    def score(self, cov_weight: float, base_open_cost: float) -> float:
        return cov_weight * self.value - base_open_cost * len(self.open)

    def to_deployment(self) -> Deployment:
        inst = self.ctx.instance
        return Deployment.build(
            (inst.site_ids[j] for j in self.open),
            ((inst.site_ids[j], inst.type_ids[u]) for j, u in self.placements),
        )

    def load_deployment(self, deployment: Deployment) -> None:
        """Adopt an externally supplied deployment (assumed checked).
        Placements already pinned by the options are not re-added."""
        inst = self.ctx.instance
        for site, type_id in sorted(deployment.placements):
            key = (inst.site_index[site], inst.type_index[type_id])
            if key not in self.placements:
                self.add(*key)
        for site in deployment.open_bases:
            self.open.add(inst.site_index[site])


# --- greedy ----------------------------------------------------------------


def _greedy_b1(ctx: _Ctx, state: _State, cov_weight: float, base_open_cost: float) -> None:
    """Repeatedly add the feasible placement with the best score gain."""
    placed_mask = np.zeros((ctx.n_types, ctx.n_sites), dtype=bool)
    for j, u in state.placements:
        placed_mask[u, j] = True
    while True:
        open_mask = np.zeros(ctx.n_sites, dtype=bool)
        open_mask[list(state.open)] = True
        may_open = ctx.frozen_bases is None and len(state.open) < ctx.max_bases
        best = None  # (score_gain, site, type, opens)
        for u in range(ctx.n_types):
            if state.rem_fleet[u] <= 0:
                continue
            g = kernels.gains(ctx.words[u], state.covered[u], ctx.q[u])
            score = cov_weight * g.astype(np.float64)
            if base_open_cost:
                score = score - base_open_cost * (~open_mask)
            feas = ctx.allowed & ~placed_mask[u] & (state.load < ctx.capacity)
            if not may_open:
                feas &= open_mask
            if not feas.any():
                continue
            score[~feas] = -np.inf
            m = score.max()
            if m <= _TOL:
                continue
            j = int(np.flatnonzero(score == m)[0])
            if best is None or m > best[0] or (m == best[0] and (j, u) < (best[1], best[2])):
                best = (m, j, u, not open_mask[j])
        if best is None:
            return
        _, j, u, _opens = best
        state.add(j, u)
        placed_mask[u, j] = True


def _greedy_bn(ctx: _Ctx, state: _State) -> None:
    """Greedy for the b-covering objective: primary gain is newly covered
    demand, ties resolved by progress toward the required team counts."""
    placed_mask = np.zeros((ctx.n_types, ctx.n_sites), dtype=bool)
    for j, u in state.placements:
        placed_mask[u, j] = True
    while True:
        open_mask = np.zeros(ctx.n_sites, dtype=bool)
        open_mask[list(state.open)] = True
        may_open = ctx.frozen_bases is None and len(state.open) < ctx.max_bases
        best = None  # (gain_new, gain_progress, site, type)
        for u in range(ctx.n_types):
            if state.rem_fleet[u] <= 0:
                continue
            gain_new, gain_prog = kernels.b_gains(ctx.words[u], state.counts[u], ctx.q[u], ctx.need[u])
            feas = ctx.allowed & ~placed_mask[u] & (state.load < ctx.capacity)
            if not may_open:
                feas &= open_mask
            for j in np.flatnonzero(feas):
                key = (int(gain_new[j]), int(gain_prog[j]))
                if key <= (0, 0):
                    continue
                if best is None or key > (best[0], best[1]) or (
                    key == (best[0], best[1]) and (int(j), u) < (best[2], best[3])
                ):
                    best = (key[0], key[1], int(j), u)
        if best is None:
            return
        state.add(best[2], best[3])
        placed_mask[best[3], best[2]] = True


# --- local search ----------------------------------------------------------


def _relocation_data(ctx: _Ctx, state: _State, j: int, u: int):
    """Coverage of type u with placement (j, u) removed, and the per-target
    gain of re-adding one team of type u anywhere."""
    rows = np.array(sorted(jj for jj, uu in state.placements if uu == u and jj != j), dtype=np.int64)
    if state.uses_counts:
        counts = state.counts[u].copy()
        kernels.update_counts(counts, ctx.words[u, j], -1)
        val = int(kernels.counts_value(counts, ctx.q[u], ctx.need[u]))
        gain, _ = kernels.b_gains(ctx.words[u], counts, ctx.q[u], ctx.need[u])
    else:
        base = kernels.union_rows(ctx.words[u], rows)
        val = int(kernels.mask_value(base, ctx.q[u]))
        gain = kernels.gains(ctx.words[u], base, ctx.q[u])
    return val, gain


def _local_search_pass(ctx: _Ctx, state: _State, cov_weight: float, base_open_cost: float):
    """Best strictly improving move, or None. Moves never decrease covered
    demand, which keeps the heuristic's coverage monotone even when base
    openings are priced into the score."""
    placed_at: dict[int, list[int]] = {}
    for j, u in state.placements:
        placed_at.setdefault(j, []).append(u)
    placed_mask = np.zeros((ctx.n_types, ctx.n_sites), dtype=bool)
    for j, u in state.placements:
        placed_mask[u, j] = True
    open_mask = np.zeros(ctx.n_sites, dtype=bool)
    open_mask[list(state.open)] = True
    budget_left = ctx.max_bases - len(state.open)
    movable = sorted(p for p in state.placements if p not in ctx.frozen_placements)

    cache: dict[tuple[int, int], tuple[int, np.ndarray]] = {}
    best = None  # (score_gain, cov_gain, kind, source, type/types, target)

    def consider(score_gain: float, cov_gain: int, key):
        nonlocal best
        if cov_gain < 0 or score_gain <= _TOL:
            return
        if best is None or score_gain > best[0] + _TOL or (
            abs(score_gain - best[0]) <= _TOL and key < best[2]
        ):
            best = (score_gain, cov_gain, key)

    for j, u in movable:
        val_without, gain = _relocation_data(ctx, state, j, u)
        cache[(j, u)] = (val_without, gain)
        closes = state.load[j] == 1 and (ctx.frozen_bases is None or j not in ctx.frozen_bases)
        for target in np.flatnonzero(ctx.allowed & ~placed_mask[u] & (state.load < ctx.capacity)):
            target = int(target)
            if target == j:
                continue
            opens = not open_mask[target]
            if opens and (ctx.frozen_bases is not None or budget_left + (1 if closes else 0) < 1):
                continue
            cov_gain = val_without + int(gain[target]) - int(state.type_value[u])
            score_gain = cov_weight * cov_gain + base_open_cost * ((1 if closes else 0) - (1 if opens else 0))
            consider(score_gain, cov_gain, (0, j, u, target))

    if ctx.frozen_bases is None:
        for j in sorted(placed_at):
            types_here = sorted(placed_at[j])
            if any((j, u) in ctx.frozen_placements for u in types_here):
                continue
            for u in types_here:
                if (j, u) not in cache:
                    cache[(j, u)] = _relocation_data(ctx, state, j, u)
            candidates = np.flatnonzero(
                ctx.allowed & ~open_mask & (ctx.capacity >= len(types_here))
            )
            for target in candidates:
                target = int(target)
                cov_gain = 0
                for u in types_here:
                    val_without, gain = cache[(j, u)]
                    cov_gain += val_without + int(gain[target]) - int(state.type_value[u])
                consider(cov_weight * cov_gain, cov_gain, (1, j, -1, target))

    return best


def _local_search(ctx: _Ctx, state: _State, cov_weight: float, base_open_cost: float) -> None:
    while True:
        best = _local_search_pass(ctx, state, cov_weight, base_open_cost)
        if best is None:
            return
        _, _, key = best
        kind, j, u, target = key
        if kind == 0:
            state.remove(j, u)
            state.add(target, u)
        else:
            types_here = sorted(uu for uu in range(ctx.n_types) if (j, uu) in state.placements)
            for uu in types_here:
                state.remove(j, uu)
            for uu in types_here:
                state.add(target, uu)


# --- exact search ----------------------------------------------------------


def _branch_order(ctx: _Ctx) -> list[int]:
    """Sites ordered by root marginal demand, ties by index."""
    empty = np.zeros(kernels.n_words(ctx.n_demands), dtype=np.uint64)
    total = np.zeros(ctx.n_sites, dtype=np.int64)
    for u in range(ctx.n_types):
        if ctx.fleet[u] > 0:
            total += kernels.gains(ctx.words[u], empty, ctx.q[u])
    sites = [j for j in range(ctx.n_sites) if ctx.allowed[j]]
    return sorted(sites, key=lambda j: (-int(total[j]), j))


def _top_k_sum(values: np.ndarray, k: int) -> int:
    if k <= 0 or values.size == 0:
        return 0
    if k >= values.size:
        return int(values.sum())
    part = np.partition(values, values.size - k)[values.size - k:]
    return int(part.sum())


class _ExactSearch:
    """Depth-first implicit enumeration over per-site team subsets.

    Sites are visited in a static order of decreasing root marginal demand.
    Pruning combines two admissible bounds per type: the residual value of
    the union of all remaining rows (tight under heavy overlap, computed
    from precomputed suffix unions) and the sum of the largest remaining
    single-site residual gains the fleet and base budget still allow (tight
    when resources are scarce).
    """

    def __init__(self, ctx: _Ctx, cov_weight: float, base_open_cost: float,
                 time_limit: float | None):
        self.ctx = ctx
        self.cov_weight = cov_weight
        self.base_open_cost = base_open_cost
        self.order = _branch_order(ctx)
        n_order = len(self.order)
        order_idx = np.array(self.order, dtype=np.int64)
        n_words = ctx.words.shape[2]
        # rows reordered to branch order so per-node slices are views
        self.rows = [np.ascontiguousarray(ctx.words[u][order_idx]) for u in range(ctx.n_types)]
        # suffix_union[u][pos] = union of rows order[pos:]
        self.suffix = []
        for u in range(ctx.n_types):
            suffix = np.zeros((n_order + 1, n_words), dtype=np.uint64)
            for pos in range(n_order - 1, -1, -1):
                suffix[pos] = suffix[pos + 1] | self.rows[u][pos]
            self.suffix.append(suffix)
        self.time_limit = time_limit
        self.t0 = time.perf_counter()
        self.nodes = 0
        self.best_score = -np.inf
        self.best: tuple[set, set] | None = None

    def _tick(self) -> None:
        self.nodes += 1
        if self.time_limit is not None and self.nodes % 256 == 0:
            if time.perf_counter() - self.t0 > self.time_limit:
                raise _TimeUp

    def seed(self, state: _State) -> None:
        score = state.score(self.cov_weight, self.base_open_cost)
        if score > self.best_score:
            self.best_score = score
            self.best = (set(state.placements), set(state.open))

    def run(self, state: _State) -> str:
        self.seed(state)
        try:
            self._visit(state, 0)
        except _TimeUp:
            return "time-limit"
        return "optimal"

    def _visit(self, state: _State, pos: int) -> None:
        ctx = self.ctx
        self._tick()
        score = state.score(self.cov_weight, self.base_open_cost)
        if score > self.best_score:
            self.best_score = score
            self.best = (set(state.placements), set(state.open))
        if pos >= len(self.order):
            return

        preopened = sum(1 for j in self.order[pos:] if j in state.open)
        budget = ctx.max_bases - len(state.open) if ctx.frozen_bases is None else 0
        caps = []
        union_bound = 0
        for u in range(ctx.n_types):
            cap = min(int(state.rem_fleet[u]), budget + preopened)
            caps.append(cap)
            if cap > 0:
                union_bound += int(
                    kernels.gains(self.suffix[u][pos:pos + 1], state.covered[u], ctx.q[u])[0]
                )
        if score + self.cov_weight * union_bound <= self.best_score + _TOL:
            return

        gain_vectors: dict[int, np.ndarray] = {}
        topk_bound = 0
        for u in range(ctx.n_types):
            if caps[u] <= 0:
                continue
            g = kernels.gains(self.rows[u][pos:], state.covered[u], ctx.q[u])
            gain_vectors[u] = g
            topk_bound += _top_k_sum(g, caps[u])
        if score + self.cov_weight * topk_bound <= self.best_score + _TOL:
            return

        site = self.order[pos]
        opens = site not in state.open
        usable = []
        for u in range(ctx.n_types):
            if state.rem_fleet[u] <= 0 or (site, u) in state.placements:
                continue
            if u in gain_vectors:
                gain = int(gain_vectors[u][0])
            else:
                gain = int(kernels.gains(self.rows[u][pos:pos + 1], state.covered[u], ctx.q[u])[0])
            if gain > 0:
                usable.append((u, gain))
        cap_left = int(ctx.capacity[site] - state.load[site])
        children = []
        if usable and cap_left > 0 and not (opens and budget <= 0 and ctx.frozen_bases is None):
            for size in range(1, min(cap_left, len(usable)) + 1):
                for combo in itertools.combinations(usable, size):
                    gain = sum(g for _u, g in combo)
                    delta = self.cov_weight * gain - (self.base_open_cost if opens else 0.0)
                    children.append((-delta, tuple(u for u, _ in combo)))
        children.sort()
        for _neg, types in children:
            for u in types:
                state.add(site, u)
            self._visit(state, pos + 1)
            for u in reversed(types):
                state.remove(site, u)
        self._visit(state, pos + 1)

    def result(self, ctx: _Ctx) -> _State:
        state = _State(ctx)
        placements, opens = self.best
        for j, u in sorted(placements - ctx.frozen_placements):
            state.add(j, u)
        state.open |= opens
        return state


class _ExactSearchB(_ExactSearch):
    """Exact search for the b-covering objective.

    The top-k residual bound is not admissible once b > 1 (two future sites
    can jointly cover what neither covers alone), so this variant bounds by
    possibility: demand (i, u) can still end covered only if the placed
    covering teams plus the best case over remaining sites and resources
    reach b_u.
    """

    def _visit(self, state: _State, pos: int) -> None:
        ctx = self.ctx
        self._tick()
        if state.value > self.best_score:
            self.best_score = state.value
            self.best = (set(state.placements), set(state.open))
        if pos >= len(self.order):
            return

        remaining = np.array(self.order[pos:], dtype=np.int64)
        preopened = sum(1 for j in self.order[pos:] if j in state.open)
        budget = ctx.max_bases - len(state.open) if ctx.frozen_bases is None else 0
        bound = 0
        for u in range(ctx.n_types):
            future = kernels.cover_counts(ctx.words[u], remaining, ctx.n_demands).astype(np.int64)
            cap = min(int(state.rem_fleet[u]), budget + preopened)
            reachable = state.counts[u].astype(np.int64) + np.minimum(future, cap) >= ctx.need[u]
            bound += int(ctx.q[u][reachable].sum())
        if bound <= self.best_score:
            return

        site = self.order[pos]
        opens = site not in state.open
        usable = []
        for u in range(ctx.n_types):
            if state.rem_fleet[u] <= 0 or (site, u) in state.placements:
                continue
            gain_new, gain_prog = kernels.b_gains(
                ctx.words[u][site:site + 1], state.counts[u], ctx.q[u], ctx.need[u]
            )
            if int(gain_new[0]) > 0 or int(gain_prog[0]) > 0:
                usable.append((u, int(gain_new[0])))
        cap_left = int(ctx.capacity[site] - state.load[site])
        children = []
        if usable and cap_left > 0 and not (opens and (ctx.frozen_bases is None and ctx.max_bases - len(state.open) <= 0)):
            for size in range(1, min(cap_left, len(usable)) + 1):
                for combo in itertools.combinations(usable, size):
                    gain = sum(g for _u, g in combo)
                    children.append((-float(gain), tuple(u for u, _ in combo)))
        children.sort()
        for _neg, types in children:
            for u in types:
                state.add(site, u)
            self._visit(state, pos + 1)
            for u in reversed(types):
                state.remove(site, u)
        self._visit(state, pos + 1)

    def seed(self, state: _State) -> None:
        if state.value > self.best_score:
            self.best_score = state.value
            self.best = (set(state.placements), set(state.open))


# --- entry points ----------------------------------------------------------


def _guard_exact(ctx: _Ctx, options: SolveOptions) -> None:
    searchable = ctx.searchable_sites()
    if searchable > options.exact_site_limit:
        raise GuardError(
            f"exact mode refuses {searchable} searchable sites "
            f"(limit {options.exact_site_limit}); use a heuristic mode or fix the base set"
        )


def _resolve_mode(ctx: _Ctx, options: SolveOptions) -> str:
    mode = options.normalized_mode()
    if mode == "auto":
        return "exact" if ctx.searchable_sites() <= options.exact_site_limit else "greedy-ls"
    return mode


def _run(instance: Instance, cover: CoverMatrix, options: SolveOptions, *,
         cov_weight: float = 1.0, base_open_cost: float = 0.0,
         need: Sequence[int] | None = None, mode: str | None = None):
    """Shared driver. Returns (state, proof, explored_nodes, wall_time)."""
    ctx = _Ctx(instance, cover, options, need=need)
    mode = mode or _resolve_mode(ctx, options)
    start = time.perf_counter()
    state = _State(ctx)

    if mode == "exact":
        _guard_exact(ctx, options)
        warm = _State(ctx)
        if warm.uses_counts:
            _greedy_bn(ctx, warm)
        else:
            _greedy_b1(ctx, warm, cov_weight, base_open_cost)
        _local_search(ctx, warm, cov_weight, base_open_cost)
        search_cls = _ExactSearchB if warm.uses_counts else _ExactSearch
        search = search_cls(ctx, cov_weight, base_open_cost, options.time_limit_s)
        search.seed(warm)
        proof = search.run(state)
        final = search.result(ctx)
        return final, proof, search.nodes, time.perf_counter() - start

    if state.uses_counts:
        _greedy_bn(ctx, state)
    else:
        _greedy_b1(ctx, state, cov_weight, base_open_cost)
    steps = len(state.placements - ctx.frozen_placements)
    if mode == "greedy-ls":
        _local_search(ctx, state, cov_weight, base_open_cost)
    return state, "heuristic", steps, time.perf_counter() - start


def solve_exact(instance: Instance, cover: CoverMatrix, options: SolveOptions | None = None) -> SolveResult:
    """Provably maximal covered demand via implicit enumeration."""
    options = options or SolveOptions()
    state, proof, nodes, wall = _run(instance, cover, options, mode="exact")
    deployment = state.to_deployment()
    return SolveResult(deployment, evaluate_deployment(instance, cover, deployment), proof, nodes, wall)


def solve_greedy(instance: Instance, cover: CoverMatrix, options: SolveOptions | None = None) -> SolveResult:
    """Deterministic greedy construction (no local search)."""
    options = options or SolveOptions()
    state, _proof, nodes, wall = _run(instance, cover, options, mode="greedy")
    deployment = state.to_deployment()
    return SolveResult(deployment, evaluate_deployment(instance, cover, deployment), "heuristic", nodes, wall)


def improve_local_search(instance: Instance, cover: CoverMatrix, deployment: Deployment,
                         options: SolveOptions | None = None) -> Deployment:
    """Best-improvement hill climbing from a feasible deployment. Covered
    demand never decreases; every accepted move strictly increases it."""
    check_deployment(instance, deployment)
    options = options or SolveOptions()
    ctx = _Ctx(instance, cover, options)
    state = _State(ctx)
    state.load_deployment(deployment)
    _local_search(ctx, state, 1.0, 0.0)
    return state.to_deployment()


def solve(instance: Instance, cover: CoverMatrix, options: SolveOptions | None = None) -> SolveResult:
    """Mode dispatcher: exact, greedy, greedy-ls, or auto (exact when the
    searchable site count permits, greedy-ls otherwise)."""
    options = options or SolveOptions()
    ctx = _Ctx(instance, cover, options)
    mode = _resolve_mode(ctx, options)
    if mode == "exact":
        return solve_exact(instance, cover, options)
    state, proof, nodes, wall = _run(instance, cover, options, mode=mode)
    deployment = state.to_deployment()
    return SolveResult(deployment, evaluate_deployment(instance, cover, deployment), proof, nodes, wall)
