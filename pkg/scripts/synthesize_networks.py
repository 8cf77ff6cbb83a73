"""Search for compact reversible networks over 3 qubits.

Finds gate sequences realizing the permutations needed by the multiplier
mod 7 and the modular adder: the fixed-multiplier maps x -> g*x mod 7
(fixing 7) and the cyclic adders x -> x + c mod 7 (fixing 7).  Breadth-first
search over a small gate vocabulary; results are frozen into
qba.arith_circuits and re-verified there by exhaustive tests.
"""

from collections import deque
from itertools import permutations

N_BITS = 3
SIZE = 1 << N_BITS


def apply_gate(perm, gate):
    kind, ops = gate
    out = list(perm)
    for idx, x in enumerate(perm):
        if kind == "X":
            (t,) = ops
            y = x ^ (1 << t)
        elif kind == "CNOT":
            c, t = ops
            y = x ^ (1 << t) if (x >> c) & 1 else x
        elif kind == "CCX":
            c1, c2, t = ops
            y = x ^ (1 << t) if ((x >> c1) & 1) and ((x >> c2) & 1) else x
        elif kind == "SWAP":
            a, b = ops
            ba, bb = (x >> a) & 1, (x >> b) & 1
            y = x
            if ba != bb:
                y ^= (1 << a) | (1 << b)
        elif kind == "CSWAP":
            c, a, b = ops
            y = x
            if (x >> c) & 1:
                ba, bb = (x >> a) & 1, (x >> b) & 1
                if ba != bb:
                    y ^= (1 << a) | (1 << b)
        else:
            raise ValueError(kind)
        out[idx] = y
    return tuple(out)


def vocabulary():
    gates = []
    for t in range(N_BITS):
        gates.append(("X", (t,)))
    for c in range(N_BITS):
        for t in range(N_BITS):
            if c != t:
                gates.append(("CNOT", (c, t)))
    for t in range(N_BITS):
        cs = [q for q in range(N_BITS) if q != t]
        gates.append(("CCX", (cs[0], cs[1], t)))
    for a in range(N_BITS):
        for b in range(a + 1, N_BITS):
            gates.append(("SWAP", (a, b)))
    for c in range(N_BITS):
        a, b = [q for q in range(N_BITS) if q != c]
        gates.append(("CSWAP", (c, a, b)))
    return gates


def bfs_all(max_depth=6):
    """Map permutation -> shortest gate sequence, up to max_depth gates."""
    identity = tuple(range(SIZE))
    vocab = vocabulary()
    seen = {identity: []}
    frontier = deque([identity])
    depth = 0
    while frontier and depth < max_depth:
        depth += 1
        next_frontier = deque()
        while frontier:
            perm = frontier.popleft()
            path = seen[perm]
            for gate in vocab:
                new = apply_gate(perm, gate)
                if new not in seen:
                    seen[new] = path + [gate]
                    next_frontier.append(new)
        frontier = next_frontier
        print(f"depth {depth}: {len(seen)} permutations reachable")
    return seen


def times(g):
    return tuple((g * x) % 7 if x < 7 else 7 for x in range(8))


def plus(c):
    return tuple((x + c) % 7 if x < 7 else 7 for x in range(8))


def compose(f, g):
    """x -> f(g(x))"""
    return tuple(f[g[x]] for x in range(SIZE))


def invert(f):
    out = [0] * SIZE
    for x in range(SIZE):
        out[f[x]] = x
    return tuple(out)


def main():
    table = bfs_all(max_depth=5)

    def report(name, perm):
        seq = table.get(perm)
        if seq is None:
            print(f"{name}: NOT FOUND <= depth limit, perm={perm}")
        else:
            print(f"{name}: {len(seq)} gates: {seq}")
        return seq

    print("\n-- multiplier pieces --")
    times6 = report("N  (x6)", times(6))

    # slot 1 candidates: plain wire swaps and rotations
    candidates = {
        "swap01": apply_gate(tuple(range(SIZE)), ("SWAP", (0, 1))),
        "swap02": apply_gate(tuple(range(SIZE)), ("SWAP", (0, 2))),
        "swap12": apply_gate(tuple(range(SIZE)), ("SWAP", (1, 2))),
    }
    best = None
    for name, s1 in candidates.items():
        s2 = compose(times(5), invert(s1))
        s3 = compose(times(3), invert(s1))
        seq2, seq3 = table.get(s2), table.get(s3)
        if seq2 is None or seq3 is None:
            print(f"S1={name}: S2 or S3 beyond depth limit")
            continue
        cost = 1 + len(seq2) + len(seq3)
        print(f"S1={name}: S2={len(seq2)} gates {seq2} | S3={len(seq3)} gates {seq3}")
        if best is None or cost < best[0]:
            best = (cost, name, seq2, seq3)
    print("best slot assignment:", best)

    print("\n-- adder pieces --")
    for c in (1, 2, 4):
        report(f"+{c} mod 7", plus(c))


if __name__ == "__main__":
    main()
