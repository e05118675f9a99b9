"""Two five-qubit ring nodes joined by one internode edge, and a greedy SWAP router."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import shortest_path

from ..roofline import CircuitStats
from .circuits import BASIS_COST, Circuit, Gate


class RoutingError(RuntimeError):
    pass


@dataclass(frozen=True)
class NodeTopology:
    """Physical qubits 0..4 form node A's ring, 5..9 node B's ring."""

    ring_a: tuple[int, ...] = (0, 1, 2, 3, 4)
    ring_b: tuple[int, ...] = (5, 6, 7, 8, 9)
    link: tuple[int, int] = (4, 5)

    def __post_init__(self):
        for ring in (self.ring_a, self.ring_b):
            if len(ring) != 5 or len(set(ring)) != 5:
                raise ValueError("each node must be a ring of five distinct qubits")
        if set(self.ring_a) & set(self.ring_b):
            raise ValueError("nodes must not share qubits")
        a, b = self.link
        if not ((a in self.ring_a and b in self.ring_b) or (a in self.ring_b and b in self.ring_a)):
            raise ValueError("the link must join one qubit of each node")

    @property
    def n_qubits(self) -> int:
        return len(self.ring_a) + len(self.ring_b)

    @property
    def local_edges(self) -> frozenset:
        edges = set()
        for ring in (self.ring_a, self.ring_b):
            for i, q in enumerate(ring):
                edges.add(frozenset((q, ring[(i + 1) % len(ring)])))
        return frozenset(edges)

    @property
    def edges(self) -> frozenset:
        return self.local_edges | {frozenset(self.link)}

    def is_link(self, p: int, q: int) -> bool:
        return {p, q} == set(self.link)

    def node_of(self, q: int) -> int:
        return 0 if q in self.ring_a else 1

    def distance_matrix(self) -> np.ndarray:
        n = self.n_qubits
        adj = np.zeros((n, n))
        for e in self.edges:
            p, q = tuple(e)
            adj[p, q] = adj[q, p] = 1
        return shortest_path(adj, unweighted=True)

    def neighbours(self, q: int) -> list[int]:
        return sorted(p for e in self.edges if q in e for p in e if p != q)


def route(
    circuit: Circuit,
    topology: NodeTopology | None = None,
    *,
    initial_layout=None,
    link_swap_penalty: float = math.inf,
    defer_single_qubit: bool = True,
) -> tuple[Circuit, CircuitStats]:
    """Greedy nearest-neighbour SWAP insertion with one gate of lookahead.

    While a two-qubit gate's endpoints are not adjacent, every SWAP that moves
    one endpoint one step closer is scored by (1 + penalty if it crosses the
    link, distance of the next two-qubit gate after the SWAP); the cheapest
    is inserted. Ties fall to the lowest physical indices. The default
    infinite penalty keeps every logical qubit in its home node, so SWAPs
    stay on the rings and the link only carries cross-node gates. Gates on the
    link edge are flagged internode. With ``defer_single_qubit`` a logical
    qubit's single-qubit gates are held back until its next two-qubit gate
    (or the end), which is exact because SWAPs only relabel qubits. The
    returned circuit is expressed on physical qubits and records the final
    logical-to-physical layout.
    """
    topology = topology or NodeTopology()
    n = topology.n_qubits
    if circuit.n_qubits > n:
        raise RoutingError(f"{circuit.n_qubits} logical qubits exceed {n} physical qubits")
    dist = topology.distance_matrix()
    if np.isinf(dist).any():
        raise RoutingError("topology is disconnected")
    layout = list(range(circuit.n_qubits) if initial_layout is None else initial_layout)
    if len(set(layout)) != circuit.n_qubits or any(not 0 <= p < n for p in layout):
        raise RoutingError("initial layout must map logical qubits to distinct physical qubits")
    occupant = {p: l for l, p in enumerate(layout)}
    two_q = [i for i, g in enumerate(circuit.gates) if g.arity == 2]
    next_2q = {two_q[k]: two_q[k + 1] for k in range(len(two_q) - 1)}
    out = Circuit(n, metadata=dict(circuit.metadata, routed=True, logical_qubits=circuit.n_qubits))

    def swap_phys(p, q):
        lp, lq = occupant.get(p), occupant.get(q)
        if lp is not None:
            layout[lp] = q
        if lq is not None:
            layout[lq] = p
        occupant.pop(p, None)
        occupant.pop(q, None)
        if lp is not None:
            occupant[q] = lp
        if lq is not None:
            occupant[p] = lq
        out.gates.append(Gate("swap", (p, q), internode=topology.is_link(p, q)))

    pending: dict[int, list[Gate]] = {}

    def flush(logical):
        for g in pending.pop(logical, ()):
            out.gates.append(g.remapped((layout[logical],)))

    for idx, gate in enumerate(circuit.gates):
        if gate.arity == 1:
            if defer_single_qubit:
                pending.setdefault(gate.qubits[0], []).append(gate)
            else:
                out.gates.append(gate.remapped((layout[gate.qubits[0]],)))
            continue
        if gate.arity != 2:
            raise RoutingError(f"gate {gate.name!r} acts on {gate.arity} qubits; decompose it first")
        la, lb = gate.qubits
        nxt = circuit.gates[next_2q[idx]] if idx in next_2q else None
        while dist[layout[la], layout[lb]] > 1:
            pa, pb = layout[la], layout[lb]
            best = None
            for mover, other in ((pa, pb), (pb, pa)):
                for nb in topology.neighbours(mover):
                    if dist[nb, other] >= dist[mover, other]:
                        continue
                    cost = 1.0 + (link_swap_penalty if topology.is_link(mover, nb) else 0.0)
                    if math.isinf(cost):
                        continue
                    look = 0.0
                    if nxt is not None:
                        trial = {occupant.get(mover): nb, occupant.get(nb): mover}
                        xa = trial.get(nxt.qubits[0], layout[nxt.qubits[0]])
                        xb = trial.get(nxt.qubits[1], layout[nxt.qubits[1]])
                        look = dist[xa, xb]
                    key = (cost, look, min(mover, nb), max(mover, nb))
                    if best is None or key < best[0]:
                        best = (key, mover, nb)
            if best is None:
                raise RoutingError(f"no admissible SWAP brings {pa} and {pb} together")
            _, p, q = best
            swap_phys(p, q)
        pa, pb = layout[la], layout[lb]
        flush(la)
        flush(lb)
        out.gates.append(gate.remapped((pa, pb), internode=topology.is_link(pa, pb)))
    for logical in sorted(pending):
        flush(logical)
    out.final_layout = tuple(layout)
    return out, circuit_stats(out)


def basis_sequence(gate: Gate) -> list[tuple[int, ...]]:
    """Qubit footprints of the gate lowered to single-qubit gates and CX."""
    if gate.arity == 1:
        return [gate.qubits]
    a, b = gate.qubits
    name = gate.name
    if name == "cx":
        return [(a, b)]
    if name == "cz":
        return [(b,), (a, b), (b,)]
    if name == "cp":
        return [(a,), (a, b), (b,), (a, b), (b,)]
    if name == "swap":
        return [(a, b), (b, a), (a, b)]
    if name == "su4":
        return [(a,), (b,), (a, b), (a,), (b,), (a, b), (a,), (b,), (a, b), (a,), (b,)]
    raise ValueError(f"no basis lowering for {name!r}")


def circuit_stats(circuit: Circuit) -> CircuitStats:
    """Depth, gate counts and slot occupancy of the basis-lowered circuit."""
    front = [0] * circuit.n_qubits
    n1 = n2 = comm = busy = 0
    for g in circuit.gates:
        seq = basis_sequence(g)
        for qs in seq:
            layer = max(front[q] for q in qs) + 1
            for q in qs:
                front[q] = layer
            busy += len(qs)
            if len(qs) == 1:
                n1 += 1
            else:
                n2 += 1
        if g.internode:
            comm += BASIS_COST[g.name][1]
    depth = max(front) if front else 0
    density = busy / (circuit.n_qubits * depth) if depth else 1.0
    return CircuitStats(depth, n1, n2, comm, density)
