"""Minor embeddings of logical graphs into hardware graphs.

An embedding maps every logical vertex to a nonempty "chain" of physical
qubits such that (1) chains are pairwise disjoint, (2) each chain induces a
connected subgraph of the hardware graph, and (3) every logical edge is
covered by at least one physical edge between the two chains.

``embed_qubo`` spreads a logical QUBO over an embedding: diagonals are split
across chain qubits, couplings across all available inter-chain edges, and
every intra-chain edge receives the ferromagnetic disagreement penalty
(+M on both diagonals, -2M on the coupling) so equal chain bits contribute
nothing and a disagreeing pair costs +M.

Splitting is done with exact-residual parts: all but one part of a split
value carry at most 27 mantissa bits and the final part absorbs the exact
remainder, so the parts sum to the logical value as exact reals. Combined
with the fsum-based energy evaluation this makes the physical energy of an
intact-chain state bit-identical to the logical energy whenever the logical
coefficients are grid-representable (dyadic); for arbitrary doubles the
agreement is still far below any tolerance used downstream.
"""

from __future__ import annotations

import heapq
import json
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, WeightedGraph, chimera, chimera_index
from .qubo import BitVector, QuboMatrix, repair

__all__ = [
    "Embedding",
    "ChainPolicy",
    "EmbeddingCheck",
    "EmbedResult",
    "verify_embedding",
    "heuristic_embed",
    "clique_embedding",
    "embed_qubo",
    "auto_chain_strength",
    "unembed",
    "lift_bits",
]


@dataclass(frozen=True)
class ChainPolicy:
    """How chains are weighted and how broken chains are resolved."""

    chain_strength: float | str = "auto"
    tie_break: str = "majority-then-repair"

    def __post_init__(self) -> None:
        if self.chain_strength != "auto" and not float(self.chain_strength) > 0.0:
            raise ValueError(f"chain_strength must be positive, got {self.chain_strength}")
        if self.tie_break != "majority-then-repair":
            raise ValueError(f"unknown tie_break rule {self.tie_break!r}")


@dataclass(frozen=True)
class Embedding:
    """Assignment of logical vertices to disjoint physical chains."""

    chains: tuple[tuple[int, ...], ...]
    physical: Graph

    @property
    def logical_n(self) -> int:
        return len(self.chains)

    def size(self) -> int:
        """Number of physical qubits used (the embedded order)."""
        return sum(len(c) for c in self.chains)

    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains), default=0)

    def used_qubits(self) -> frozenset[int]:
        return frozenset(q for chain in self.chains for q in chain)

    def owner(self) -> dict[int, int]:
        """Map physical qubit -> owning logical vertex."""
        return {q: v for v, chain in enumerate(self.chains) for q in chain}

    def to_json(self) -> str:
        return json.dumps(
            {"chains": {str(v): list(chain) for v, chain in enumerate(self.chains)}},
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str, physical: Graph) -> "Embedding":
        obj = json.loads(text)
        if not isinstance(obj, dict) or "chains" not in obj:
            raise ValueError("embedding document must be an object with a 'chains' field")
        raw = obj["chains"]
        if not isinstance(raw, dict):
            raise ValueError("'chains' must map logical vertices to qubit lists")
        chains = []
        for v in range(len(raw)):
            key = str(v)
            if key not in raw:
                raise ValueError(f"'chains' is missing logical vertex {v}")
            chains.append(tuple(sorted(int(q) for q in raw[key])))
        return cls(chains=tuple(chains), physical=physical)


@dataclass(frozen=True)
class EmbeddingCheck:
    """Outcome of verifying the three minor-embedding conditions."""

    ok: bool
    failures: tuple[tuple[int, str], ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def condition_ok(self, condition: int) -> bool:
        return all(c != condition for c, _ in self.failures)


@dataclass(frozen=True)
class EmbedResult:
    """Result of a heuristic embedding run, including its wall-clock cost."""

    embedding: Embedding | None
    seconds: float
    restarts: int

    @property
    def ok(self) -> bool:
        return self.embedding is not None


def verify_embedding(gl: Graph, gp: Graph, emb: Embedding) -> EmbeddingCheck:
    """Check disjointness, chain connectivity, and logical edge coverage.

    Returns a result carrying one diagnostic per violated condition instead of
    raising, so callers can report exactly what broke.
    """
    if emb.logical_n != gl.n:
        raise ValueError(f"embedding covers {emb.logical_n} vertices, graph has {gl.n}")
    failures: list[tuple[int, str]] = []

    seen: dict[int, int] = {}
    for v, chain in enumerate(emb.chains):
        for q in chain:
            if q in seen:
                failures.append(
                    (1, f"qubit {q} is shared by logical vertices {seen[q]} and {v}")
                )
            else:
                seen[q] = v

    adj = gp.adjacency()
    for v, chain in enumerate(emb.chains):
        if not chain:
            failures.append((2, f"logical vertex {v} has an empty chain"))
            continue
        bad = [q for q in chain if not (0 <= q < gp.n)]
        if bad:
            failures.append((2, f"chain of vertex {v} leaves the hardware graph: {bad}"))
            continue
        members = set(chain)
        reached = {chain[0]}
        frontier = [chain[0]]
        while frontier:
            q = frontier.pop()
            for nb in adj[q]:
                if nb in members and nb not in reached:
                    reached.add(nb)
                    frontier.append(nb)
        if reached != members:
            failures.append(
                (2, f"chain of vertex {v} is not connected: {sorted(members - reached)} unreachable")
            )

    for u, v in gl.sorted_edges():
        cu, cv = set(emb.chains[u]), set(emb.chains[v])
        covered = any(nb in cv for q in cu if 0 <= q < gp.n for nb in adj[q])
        if not covered:
            failures.append((3, f"logical edge ({u},{v}) has no physical edge between its chains"))

    return EmbeddingCheck(ok=not failures, failures=tuple(failures))


# ---------------------------------------------------------------------------
# heuristic embedding
# ---------------------------------------------------------------------------


def _dijkstra_to_chain(
    chain: set[int],
    adj: list[list[int]],
    free: np.ndarray,
    cost: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Cheapest free-qubit routes ending next to ``chain``.

    ``dist[q]`` is the total cost of free qubits on the best path from q to a
    qubit adjacent to the chain, q itself included; ``parent`` points one step
    along that path (-1 at the chain-adjacent end).
    """
    n = len(adj)
    dist = np.full(n, math.inf)
    parent = np.full(n, -1, dtype=np.int64)
    heap: list[tuple[float, int]] = []
    for c in chain:
        for q in adj[c]:
            if free[q] and cost[q] < dist[q]:
                dist[q] = cost[q]
                heapq.heappush(heap, (cost[q], q))
    while heap:
        d, q = heapq.heappop(heap)
        if d > dist[q]:
            continue
        for nb in adj[q]:
            if free[nb]:
                nd = d + cost[nb]
                if nd < dist[nb]:
                    dist[nb] = nd
                    parent[nb] = q
                    heapq.heappush(heap, (nd, nb))
    return dist, parent


def _walk(parent: np.ndarray, start: int) -> list[int]:
    path = [start]
    while parent[path[-1]] != -1:
        path.append(int(parent[path[-1]]))
    return path


class _Workspace:
    """Mutable state for one embedding attempt."""

    def __init__(self, gp_adj: list[list[int]], n_phys: int, jitter: np.ndarray):
        self.adj = gp_adj
        self.free = np.ones(n_phys, dtype=bool)
        self.used_deg = np.zeros(n_phys, dtype=np.int64)
        self.deg = np.array([max(len(a), 1) for a in gp_adj], dtype=np.float64)
        self.jitter = jitter

    def cost(self) -> np.ndarray:
        # congestion-weighted vertex cost: crowded regions are more expensive
        return 1.0 + 0.5 * (self.used_deg / self.deg) + 0.05 * self.jitter

    def occupy(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            self.free[q] = False
            for nb in self.adj[q]:
                self.used_deg[nb] += 1

    def release(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            self.free[q] = True
            for nb in self.adj[q]:
                self.used_deg[nb] -= 1


def _route_vertex(
    ws: _Workspace,
    targets: list[set[int]],
    donate: bool,
) -> tuple[set[int], list[set[int]]] | None:
    """Grow a new chain connected to every target chain.

    Picks a root minimising the summed route costs to all targets, then routes
    to each target in turn through currently free qubits. When ``donate`` is
    set, the far half of each route is handed to the target's chain (the
    vertex-model growth that keeps high-degree hubs reachable); otherwise the
    whole route joins the new chain.
    """
    cost = ws.cost()
    fields = [_dijkstra_to_chain(t, ws.adj, ws.free, cost) for t in targets]
    score = np.zeros(len(ws.free))
    for dist, _ in fields:
        score += dist
    score -= (len(targets) - 1) * cost
    score[~ws.free] = math.inf
    root = int(np.argmin(score))
    if not math.isfinite(score[root]):
        return None

    chain: set[int] = {root}
    donations: list[set[int]] = [set() for _ in targets]
    ws.occupy([root])

    def rollback() -> None:
        ws.release(chain)
        for extra in donations:
            ws.release(extra)

    order = sorted(range(len(targets)), key=lambda t: (fields[t][0][root], t))
    for t in order:
        target = targets[t]
        if any(nb in target for q in chain for nb in ws.adj[q]):
            continue  # already adjacent, nothing to route
        dist, parent = _dijkstra_to_chain(target, ws.adj, ws.free, ws.cost())
        start = None
        best_key = (math.inf, -1)
        for q in sorted(chain):
            for nb in ws.adj[q]:
                if ws.free[nb] and math.isfinite(dist[nb]):
                    key = (float(dist[nb]), nb)
                    if start is None or key < best_key:
                        start, best_key = nb, key
        if start is None:
            rollback()
            return None
        path = _walk(parent, start)  # start .. target-adjacent qubit, all free
        ws.occupy(path)
        if donate and len(path) > 1:
            keep = (len(path) + 1) // 2
            chain.update(path[:keep])
            donations[t].update(path[keep:])
        else:
            chain.update(path)
    return chain, donations


def _free_frontier(ws: _Workspace, chain: set[int]) -> set[int]:
    return {q for c in chain for q in ws.adj[c] if ws.free[q]}


def _ensure_capacity(ws: _Workspace, chain: set[int], demand: int) -> None:
    """Annex frontier qubits until the chain can host ``demand`` more routes.

    Every future neighbour must enter through a free qubit adjacent to the
    chain; high-degree vertices would otherwise get walled in by their own
    earlier neighbours. Annexation stops when no frontier qubit would grow
    the free adjacency.
    """
    while True:
        frontier = _free_frontier(ws, chain)
        if len(frontier) >= demand or not frontier:
            return
        best = None
        best_gain = 0
        for q in sorted(frontier):
            gain = sum(1 for x in ws.adj[q] if ws.free[x] and x not in frontier) - 1
            if gain > best_gain:
                best, best_gain = q, gain
        if best is None:
            return
        chain.add(best)
        ws.occupy([best])


def _grow_attempt(gl: Graph, ws: _Workspace, rng: np.random.Generator) -> list[set[int]] | None:
    adj_logical = gl.adjacency()
    order = sorted(range(gl.n), key=lambda v: (-len(adj_logical[v]), v))
    chains: dict[int, set[int]] = {}
    for v in order:
        placed = [u for u in sorted(adj_logical[v]) if u in chains]
        if not placed:
            candidates = np.flatnonzero(ws.free)
            if len(candidates) == 0:
                return None
            q = int(rng.choice(candidates))
            chains[v] = {q}
            ws.occupy([q])
        else:
            routed = _route_vertex(ws, [chains[u] for u in placed], donate=True)
            if routed is None:
                return None
            chain, donations = routed
            chains[v] = chain
            for u, extra in zip(placed, donations):
                chains[u] |= extra
        unplaced = {u: sum(1 for x in adj_logical[u] if x not in chains) for u in chains}
        _ensure_capacity(ws, chains[v], unplaced[v])
        for u in placed:
            _ensure_capacity(ws, chains[u], unplaced[u])
    return [chains[v] for v in range(gl.n)]


def _improve(
    gl: Graph, ws: _Workspace, chains: list[set[int]], rng: np.random.Generator, passes: int = 2
) -> None:
    """Re-route single vertices to shrink the total footprint."""
    adj_logical = gl.adjacency()
    for _ in range(passes):
        improved = False
        for v in rng.permutation(gl.n):
            v = int(v)
            old = chains[v]
            if len(old) <= 1 or not adj_logical[v]:
                continue
            ws.release(old)
            routed = _route_vertex(ws, [chains[u] for u in sorted(adj_logical[v])], donate=False)
            if routed is not None and len(routed[0]) < len(old):
                chains[v] = routed[0]
                improved = True
            else:
                if routed is not None:
                    ws.release(routed[0])
                ws.occupy(old)
        if not improved:
            break


def heuristic_embed(gl: Graph, gp: Graph, seed: int = 0, max_tries: int = 8) -> EmbedResult:
    """Search for a minor embedding with randomised restarts.

    Vertices are placed in descending degree order and routed to the chains of
    their already-placed neighbours along congestion-weighted shortest paths;
    improvement passes then try to shrink individual chains. The best attempt
    (fewest physical qubits, earliest restart) wins. Failure after all
    restarts is reported as a result, not an exception; the wall clock covers
    the entire search.
    """
    if max_tries < 1:
        raise ValueError(f"max_tries must be >= 1, got {max_tries}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    t0 = time.perf_counter()
    adj = [sorted(s) for s in gp.adjacency()]
    best: list[set[int]] | None = None
    best_size = math.inf
    restarts = 0
    for attempt in range(max_tries):
        restarts += 1
        if gl.n > gp.n:
            break
        rng = np.random.default_rng((seed, attempt))
        ws = _Workspace(adj, gp.n, jitter=rng.random(gp.n))
        chains = _grow_attempt(gl, ws, rng)
        if chains is None:
            continue
        _improve(gl, ws, chains, rng)
        candidate = Embedding(tuple(tuple(sorted(c)) for c in chains), gp)
        if not verify_embedding(gl, gp, candidate):
            continue  # defensive: a broken attempt never escapes
        size = candidate.size()
        if size < best_size:
            best, best_size = chains, size
        if best_size == gl.n:
            break  # unit chains everywhere, provably minimal
    seconds = time.perf_counter() - t0
    if best is None:
        return EmbedResult(embedding=None, seconds=seconds, restarts=restarts)
    emb = Embedding(tuple(tuple(sorted(c)) for c in best), gp)
    return EmbedResult(embedding=emb, seconds=seconds, restarts=restarts)


def clique_embedding(k: int) -> Embedding:
    """Deterministic embedding of the complete graph K_{4k} into chimera(k).

    Logical vertex ``4b + a`` occupies the column strip of unit ``a`` in block
    column ``b`` (rows b..k-1, vertical side) plus the row strip of unit ``a``
    in block row ``b`` (columns 0..b, horizontal side): an L-shaped chain of
    k + 1 qubits meeting at the diagonal block, 4k(k+1) qubits in total.
    """
    if k < 1:
        raise ValueError(f"clique embedding requires k >= 1, got {k}")
    gp = chimera(k)
    chains = []
    for t in range(4 * k):
        b, a = divmod(t, 4)
        column = [chimera_index(k, r, b, 0, a) for r in range(b, k)]
        row = [chimera_index(k, b, c, 1, a) for c in range(b + 1)]
        chains.append(tuple(sorted(column + row)))
    return Embedding(chains=tuple(chains), physical=gp)


# ---------------------------------------------------------------------------
# weight distribution
# ---------------------------------------------------------------------------


def _split_parts(value: float, count: int) -> list[float]:
    """Split ``value`` into ``count`` floats summing to it as exact reals.

    The first count-1 parts are the even share rounded to 27 mantissa bits,
    which keeps later additions of the (power-of-two) chain penalty exact for
    grid-representable inputs; the last part absorbs the exact remainder.
    """
    if count == 1:
        return [value]
    m, e = math.frexp(value / count)
    coarse = math.ldexp(round(m * (1 << 26)), e - 26)
    rest = value - (count - 1) * coarse
    return [coarse] * (count - 1) + [rest]


def _chain_structure(
    q: QuboMatrix, emb: Embedding, gp: Graph
) -> tuple[dict[tuple[int, int], list[tuple[int, int]]], dict[int, list[tuple[int, int]]]]:
    """Bucket physical edges into inter-chain (per logical coupling) and intra-chain."""
    owner = emb.owner()
    inter: dict[tuple[int, int], list[tuple[int, int]]] = {}
    intra: dict[int, list[tuple[int, int]]] = {v: [] for v in range(emb.logical_n)}
    for p, r in gp.sorted_edges():
        a, b = owner.get(p), owner.get(r)
        if a is None or b is None:
            continue
        if a == b:
            intra[a].append((p, r))
        else:
            key = (min(a, b), max(a, b))
            if key in q.entries and key[0] != key[1]:
                inter.setdefault(key, []).append((p, r))
    return inter, intra


def auto_chain_strength(q: QuboMatrix, emb: Embedding, gp: Graph) -> float:
    """Chain strength that provably dominates any single chain qubit's load.

    Twice the worst per-qubit sum of absolute split weights plus the largest
    logical coefficient magnitude, rounded up to a power of two so penalty
    bookkeeping stays exact.
    """
    inter, _ = _chain_structure(q, emb, gp)
    load = _qubit_loads(q, emb, inter)
    raw = 2.0 * (max(load.values()) if load else 0.0) + q.max_abs_entry()
    if raw <= 0.0:
        return 1.0
    return math.ldexp(1.0, math.ceil(math.log2(raw)))


def _qubit_loads(
    q: QuboMatrix,
    emb: Embedding,
    inter: dict[tuple[int, int], list[tuple[int, int]]],
) -> dict[int, float]:
    load: dict[int, float] = {qb: 0.0 for chain in emb.chains for qb in chain}
    diag = q.diagonal()
    for v, chain in enumerate(emb.chains):
        if v in diag:
            for qb, part in zip(chain, _split_parts(diag[v], len(chain))):
                load[qb] += abs(part)
    for key, edges in inter.items():
        for (p, r), part in zip(edges, _split_parts(q.entries[key], len(edges))):
            load[p] += abs(part)
            load[r] += abs(part)
    return load


def embed_qubo(
    q: QuboMatrix, emb: Embedding, gp: Graph, policy: ChainPolicy = ChainPolicy()
) -> QuboMatrix:
    """Spread a logical QUBO over an embedding into the hardware graph.

    Diagonals are split equally across their chain's qubits, couplings equally
    across every physical edge between the two chains, and each intra-chain
    edge receives the disagreement penalty (+M, +M, -2M). With intact chains
    the physical energy of the lifted state equals the logical energy.
    """
    if q.n != emb.logical_n:
        raise ValueError(f"QUBO dimension {q.n} != embedded logical size {emb.logical_n}")
    check = verify_embedding(q.coupling_graph(), gp, emb)
    if not check:
        detail = "; ".join(msg for _, msg in check.failures[:3])
        raise ValueError(f"invalid embedding: {detail}")

    inter, intra = _chain_structure(q, emb, gp)
    if policy.chain_strength == "auto":
        strength = auto_chain_strength(q, emb, gp)
    else:
        strength = float(policy.chain_strength)
    if not strength > 0.0:
        raise ValueError(f"chain strength must be positive, got {strength}")

    diag: dict[int, float] = {}
    couplings: dict[tuple[int, int], float] = {}
    for v, chain in enumerate(emb.chains):
        value = q.entries.get((v, v))
        if value is not None:
            for qb, part in zip(chain, _split_parts(value, len(chain))):
                diag[qb] = diag.get(qb, 0.0) + part
    for key, edges in inter.items():
        for (p, r), part in zip(edges, _split_parts(q.entries[key], len(edges))):
            couplings[(p, r)] = part
    for v, edges in intra.items():
        for p, r in edges:
            diag[p] = diag.get(p, 0.0) + strength
            diag[r] = diag.get(r, 0.0) + strength
            couplings[(p, r)] = couplings.get((p, r), 0.0) - 2.0 * strength

    entries: dict[tuple[int, int], float] = {}
    for qb, value in diag.items():
        if value != 0.0:
            entries[(qb, qb)] = value
    for key, value in couplings.items():
        if value != 0.0:
            entries[key] = value
    return QuboMatrix(n=gp.n, entries=entries)


def lift_bits(emb: Embedding, x_logical: Sequence[int]) -> BitVector:
    """Physical state with every chain set to its logical bit (others zero)."""
    if len(x_logical) != emb.logical_n:
        raise ValueError(f"logical vector length {len(x_logical)} != {emb.logical_n}")
    bits = [0] * emb.physical.n
    for v, chain in enumerate(emb.chains):
        if x_logical[v]:
            for qb in chain:
                bits[qb] = 1
    return tuple(bits)


def unembed(
    x_phys: Sequence[int],
    emb: Embedding,
    weighted: WeightedGraph,
    policy: ChainPolicy = ChainPolicy(),
) -> BitVector:
    """Resolve a physical sample to a feasible logical selection.

    Each logical bit is the majority vote over its chain (exact ties fall to
    0); the vote is then repaired so the result always decodes to an
    independent set.
    """
    if len(x_phys) != emb.physical.n:
        raise ValueError(f"physical vector length {len(x_phys)} != {emb.physical.n}")
    votes = tuple(
        1 if 2 * sum(x_phys[qb] for qb in chain) > len(chain) else 0 for chain in emb.chains
    )
    return repair(weighted, votes)
