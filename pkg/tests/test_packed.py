"""Equivalence of the fused couple-and-measure primitives with literal
gate-by-gate simulation on small states.

The reference path builds the joint state explicitly, applies the gates of
the fused pattern one at a time with qudit_sim, and projects onto a fixed
outcome.  The fused path must reproduce both the outcome distribution and
the conditional post-measurement state (up to global phase).
"""

import itertools
import math

import numpy as np
import pytest

from qba import qudit_sim as qs
from qba.packed import PackedState, couple_measure, fourier_couple_chain


def random_state(rng, n, dim, n_terms):
    terms = {}
    while len(terms) < n_terms:
        basis = tuple(int(rng.integers(dim)) for _ in range(n))
        terms[basis] = complex(rng.normal(), rng.normal())
    s = qs.SparseState(n, dim, terms)
    s.renormalize()
    return s


def joint_norm_sq_projected(joint, n, outcome):
    """Norm^2 of the joint state projected on target columns == outcome."""
    total = 0.0
    for basis, amp in joint.terms.items():
        if all(basis[n + c] == outcome[c] for c in range(n)):
            total += abs(amp) ** 2
    return total


def project_target(joint, n, outcome):
    """Collapse target columns to a fixed outcome and trace them out."""
    kept = {}
    for basis, amp in joint.terms.items():
        if all(basis[n + c] == outcome[c] for c in range(n)):
            kept[basis[:n]] = kept.get(basis[:n], 0.0) + amp
    s = qs.SparseState(n, joint.dim, kept)
    s.renormalize()
    return s


def states_equal_up_to_phase(a: qs.SparseState, b: qs.SparseState) -> bool:
    return a.fidelity(b) > 1 - 1e-9


class TestCoupleMeasure:
    @pytest.mark.parametrize("seed", range(6))
    def test_outcome_distribution_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        P, n = 3, 2
        A = random_state(rng, n, P, 4)
        B = random_state(rng, n, P, 3)
        b = 1 + int(rng.integers(P - 1))

        # Reference joint distribution over every possible outcome.
        ref_probs = {}
        for outcome in itertools.product(range(P), repeat=n):
            joint = qs.tensor(A, B)
            for c in range(n):
                qs.apply_cx_b(joint, c, n + c, b)
            ref_probs[outcome] = joint_norm_sq_projected(joint, n, outcome)
        assert sum(ref_probs.values()) == pytest.approx(1.0)

        # Fused outcome frequencies.
        counts = {}
        trials = 4000
        for t in range(trials):
            trial_rng = np.random.default_rng((seed, t))
            pa = PackedState.from_sparse(A)
            pb = PackedState.from_sparse(B)
            w, prob = couple_measure(pa, pb, b, trial_rng)
            key = tuple(int(x) for x in w)
            counts[key] = counts.get(key, 0) + 1
            assert prob == pytest.approx(ref_probs[key], abs=1e-9)
        for outcome, p in ref_probs.items():
            assert counts.get(outcome, 0) / trials == pytest.approx(p, abs=0.05)

    @pytest.mark.parametrize("seed", range(8))
    def test_post_state_matches_reference(self, seed):
        rng = np.random.default_rng(100 + seed)
        P, n = 5, 2
        A = random_state(rng, n, P, 5)
        B = random_state(rng, n, P, 4)
        b = 1 + int(rng.integers(P - 1))

        pa = PackedState.from_sparse(A)
        pb = PackedState.from_sparse(B)
        w, _ = couple_measure(pa, pb, b, np.random.default_rng(seed))
        outcome = tuple(int(x) for x in w)

        joint = qs.tensor(A, B)
        for c in range(n):
            qs.apply_cx_b(joint, c, n + c, b)
        ref = project_target(joint, n, outcome)
        assert states_equal_up_to_phase(pa.to_sparse(), ref)


def reference_fourier_chain(trees, multipliers, outcomes):
    """Literal circuit: QFT all, couple down the chain, project measured
    trees on the given Fourier-basis outcomes, inverse QFT the kept tree."""
    n = trees[0].num_qupits
    L = len(trees)
    joint = trees[0]
    for t in trees[1:]:
        joint = qs.tensor(joint, t)
    for col in range(n * L):
        qs.apply_fourier(joint, col)
    for l in range(1, L):
        for c in range(n):
            qs.apply_cx_b(joint, (l - 1) * n + c, l * n + c, multipliers[l - 1])
    # project measured trees
    prob = 0.0
    kept = {}
    for basis, amp in joint.terms.items():
        ok = True
        for l in range(1, L):
            for c in range(n):
                if basis[l * n + c] != outcomes[l - 1][c]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            prob += abs(amp) ** 2
            kept[basis[:n]] = kept.get(basis[:n], 0.0) + amp
    if prob == 0.0:
        return 0.0, None
    kept_state = qs.SparseState(n, joint.dim, kept)
    kept_state.renormalize()
    for c in range(n):
        qs.apply_fourier(kept_state, c, inverse=True)
    return prob, kept_state


class TestFourierCoupleChain:
    @pytest.mark.parametrize("seed", range(6))
    def test_pair_matches_reference(self, seed):
        rng = np.random.default_rng(200 + seed)
        P, n = 3, 2
        A = random_state(rng, n, P, 3)
        B = random_state(rng, n, P, 2)
        b1 = 1 + int(rng.integers(P - 1))

        pa = PackedState.from_sparse(A)
        pb = PackedState.from_sparse(B)
        ws, prob = fourier_couple_chain([pa, pb], [b1], np.random.default_rng(seed))
        outcome = tuple(int(x) for x in ws[0])

        ref_prob, ref_state = reference_fourier_chain([A, B], [b1], [outcome])
        assert prob == pytest.approx(ref_prob, abs=1e-9)
        assert ref_state is not None
        assert states_equal_up_to_phase(pa.to_sparse(), ref_state)

    @pytest.mark.parametrize("seed", range(4))
    def test_pair_outcome_distribution(self, seed):
        rng = np.random.default_rng(300 + seed)
        P, n = 3, 1
        A = random_state(rng, n, P, 2)
        B = random_state(rng, n, P, 2)
        b1 = 1 + int(rng.integers(P - 1))

        ref_probs = {}
        for outcome in itertools.product(range(P), repeat=n):
            p, _ = reference_fourier_chain([A, B], [b1], [outcome])
            ref_probs[outcome] = p
        assert sum(ref_probs.values()) == pytest.approx(1.0)

        counts = {}
        trials = 4000
        for t in range(trials):
            trial_rng = np.random.default_rng((seed, t))
            pa = PackedState.from_sparse(A)
            pb = PackedState.from_sparse(B)
            ws, prob = fourier_couple_chain([pa, pb], [b1], trial_rng)
            key = tuple(int(x) for x in ws[0])
            counts[key] = counts.get(key, 0) + 1
            assert prob == pytest.approx(ref_probs[key], abs=1e-9)
        for outcome, p in ref_probs.items():
            assert counts.get(outcome, 0) / trials == pytest.approx(p, abs=0.05)

    @pytest.mark.parametrize("seed", range(5))
    def test_three_tree_chain_matches_reference(self, seed):
        rng = np.random.default_rng(400 + seed)
        P, n = 3, 1
        A = random_state(rng, n, P, 3)
        B = random_state(rng, n, P, 2)
        C = random_state(rng, n, P, 2)
        b1 = 1 + int(rng.integers(P - 1))
        b2 = 1 + int(rng.integers(P - 1))

        pa, pb, pc = (PackedState.from_sparse(s) for s in (A, B, C))
        ws, prob = fourier_couple_chain([pa, pb, pc], [b1, b2], np.random.default_rng(seed))
        outcomes = [tuple(int(x) for x in w) for w in ws]

        ref_prob, ref_state = reference_fourier_chain([A, B, C], [b1, b2], outcomes)
        assert prob == pytest.approx(ref_prob, abs=1e-9)
        assert ref_state is not None
        assert states_equal_up_to_phase(pa.to_sparse(), ref_state)

    def test_three_tree_chain_total_probability(self):
        rng = np.random.default_rng(99)
        P, n = 3, 1
        A = random_state(rng, n, P, 2)
        B = random_state(rng, n, P, 2)
        C = random_state(rng, n, P, 2)
        total = 0.0
        for o1 in itertools.product(range(P), repeat=n):
            for o2 in itertools.product(range(P), repeat=n):
                p, _ = reference_fourier_chain([A, B, C], [2, 1], [o1, o2])
                total += p
        assert total == pytest.approx(1.0)


class TestFourierBornSample:
    def test_matches_dense_distribution(self):
        rng = np.random.default_rng(5)
        P, n = 3, 2
        state = random_state(rng, n, P, 4)
        # dense Fourier transform
        omega = np.exp(2j * np.pi / P)
        F = omega ** np.outer(np.arange(P), np.arange(P)) / math.sqrt(P)
        dense = np.zeros((P,) * n, dtype=complex)
        for basis, amp in state.terms.items():
            dense[basis] = amp
        transformed = np.einsum("ab,cd,bd->ac", F, F, dense)
        probs = np.abs(transformed) ** 2

        packed = PackedState.from_sparse(state)
        counts = np.zeros((P,) * n)
        trials = 6000
        for t in range(trials):
            row, prob = packed.fourier_born_sample(np.random.default_rng(t))
            key = tuple(int(x) for x in row)
            counts[key] += 1
            assert prob == pytest.approx(probs[key], abs=1e-9)
        assert np.allclose(counts / trials, probs, atol=0.05)


class TestPackedRoundtrip:
    def test_sparse_roundtrip(self):
        rng = np.random.default_rng(1)
        s = random_state(rng, 3, 5, 6)
        packed = PackedState.from_sparse(s)
        back = packed.to_sparse()
        assert states_equal_up_to_phase(s, back)

    def test_pauli_matches_sparse(self):
        rng = np.random.default_rng(2)
        s = random_state(rng, 2, 5, 4)
        packed = PackedState.from_sparse(s)
        qs.apply_pauli(s, 1, a=2, b=3)
        packed.apply_pauli(1, a=2, b=3)
        assert states_equal_up_to_phase(s, packed.to_sparse())
