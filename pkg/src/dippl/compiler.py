"""Symbolic compilation of dippl programs to weighted Boolean formulas.

A statement compiles to a BDD ``phi`` over three banks of variables --
unprimed (input state), primed (output state), and per-flip sample
variables -- together with a weight function mapping each flip variable
to ``(theta, 1 - theta)`` and every state variable to ``(1, 1)``.
``phi`` relates input to output states; probability queries against it
are ratios of weighted model counts (see ``dippl.infer``).

Compilation rules, writing ``gamma(S)`` for the frame formula
``AND_{x in S} (x <=> x')``, ``V`` for all program variables, and ``e``
for the input-bank compilation of an expression:

* ``skip``              -> ``gamma(V)``
* ``x ~ flip(theta)``   -> ``(x' <=> f) & gamma(V - {x})``, fresh ``f``
  weighted ``(theta, 1 - theta)``
* ``x := e``            -> ``(x' <=> e) & gamma(V - {x})``
* ``observe(e)``        -> ``e & gamma(V)``
* ``if e {s1} else {s2}`` -> ``(e & phi1) | (!e & phi2)``
* ``s1; s2``            -> rebase ``phi2`` onto a transient double-primed
  output bank, conjoin with ``phi1``, existentially quantify the shared
  (primed) intermediate state, and pull the result back to the primed
  bank.

The double-primed bank exists only inside sequence composition and never
appears in a finished formula or in the WMC universe.

Variable order: each program variable owns three adjacent positions
(unprimed, primed, double-primed), so the bank shifts used by
sequencing are order-preserving renamings.  Triples of never-flipped
variables come first in order of first appearance; every flip variable
sits immediately before the triple of the variable it samples into,
with these groups ordered by flip label.  This interleaving gives
linear-size diagrams for chain-structured programs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .bdd import Bdd, NodeStore, WeightFn
from .lang import (
    And,
    Assign,
    Const,
    Expr,
    Flip,
    If,
    Not,
    Observe,
    Or,
    Program,
    Seq,
    Skip,
    Stmt,
    UnknownVariable,
    VarRef,
    flips_of,
)
from .oracle import State

SEQ_STRATEGIES = ("fused", "naive")


def _seq_spine(s: Stmt) -> list[Stmt]:
    """Non-Seq statements of a sequence, in execution order."""
    atoms: list[Stmt] = []
    stack = [s]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            stack.append(node.second)
            stack.append(node.first)
        else:
            atoms.append(node)
    return atoms


@dataclass(frozen=True)
class VarBanks:
    """Variable-bank bookkeeping for one compiled program.

    ``universe`` (everything except the transient double-primed bank) is
    the variable set every weighted model count ranges over.
    """

    unprimed: Mapping[str, int]
    primed: Mapping[str, int]
    double_primed: Mapping[str, int]
    flip_var: Mapping[int, int]  # flip label -> variable id
    universe: frozenset[int]

    @property
    def flips(self) -> tuple[int, ...]:
        """Flip variable ids in flip-label order."""
        return tuple(self.flip_var[label] for label in sorted(self.flip_var))

    def seq_shift(self) -> dict[int, int]:
        """unprimed -> primed, primed -> double-primed (for the rhs of a Seq)."""
        shift = {self.unprimed[x]: self.primed[x] for x in self.unprimed}
        shift.update({self.primed[x]: self.double_primed[x] for x in self.primed})
        return shift

    def seq_unshift(self) -> dict[int, int]:
        """double-primed -> primed (after the intermediate state is gone)."""
        return {self.double_primed[x]: self.primed[x] for x in self.double_primed}

    def primed_set(self) -> frozenset[int]:
        return frozenset(self.primed.values())


def allocate_banks(program: Program, *, op_cache: bool = True) -> tuple[NodeStore, VarBanks]:
    """Create a store whose global order interleaves flips with their targets."""
    flips = sorted(flips_of(program.body), key=lambda f: f.label)
    first_flip_label: dict[str, int] = {}
    for flip in flips:
        first_flip_label.setdefault(flip.target, flip.label)

    store = NodeStore(op_cache=op_cache)
    unprimed: dict[str, int] = {}
    primed: dict[str, int] = {}
    double_primed: dict[str, int] = {}
    flip_var: dict[int, int] = {}

    def add_triple(name: str):
        unprimed[name] = store.add_var(name)
        primed[name] = store.add_var(name + "'")
        double_primed[name] = store.add_var(name + "''")

    for name in program.vars:
        if name not in first_flip_label:
            add_triple(name)
    for name in sorted(first_flip_label, key=first_flip_label.get):
        for flip in flips:
            if flip.target == name:
                flip_var[flip.label] = store.add_var(f"f{flip.label}")
        add_triple(name)

    universe = frozenset(unprimed.values()) | frozenset(primed.values()) | frozenset(
        flip_var.values()
    )
    banks = VarBanks(unprimed, primed, double_primed, flip_var, universe)
    return store, banks


def compile_expr(e: Expr, banks: VarBanks, store: NodeStore) -> Bdd:
    """Expression as a BDD over the unprimed (input-state) bank."""
    if isinstance(e, VarRef):
        var = banks.unprimed.get(e.name)
        if var is None:
            raise UnknownVariable(e.name)
        return store.var(var)
    if isinstance(e, Const):
        return store.constant(e.value)
    if isinstance(e, Not):
        return store.not_(compile_expr(e.inner, banks, store))
    if isinstance(e, And):
        return store.apply(
            "and", compile_expr(e.lhs, banks, store), compile_expr(e.rhs, banks, store)
        )
    if isinstance(e, Or):
        return store.apply(
            "or", compile_expr(e.lhs, banks, store), compile_expr(e.rhs, banks, store)
        )
    raise TypeError(f"not an expression: {e!r}")


def gamma(banks: VarBanks, store: NodeStore, exclude: frozenset[str] = frozenset()) -> Bdd:
    """Frame formula: unprimed equals primed for every non-excluded variable.

    Each variable's (unprimed, primed) pair is adjacent in the global
    order, so the whole conjunction is built in one bottom-up pass.
    """
    return store.iff_cube(
        {
            banks.unprimed[name]: banks.primed[name]
            for name in banks.unprimed
            if name not in exclude
        }
    )


def state_cube(state: State, positions: Mapping[str, int], store: NodeStore) -> Bdd:
    """The conjunction of literals fixing ``state`` on one variable bank."""
    try:
        literals = {positions[name]: value for name, value in zip(state.vars, state.values)}
    except KeyError as exc:
        raise UnknownVariable(str(exc.args[0])) from None
    return store.cube(literals)


def compile_stmt(
    stmt: Stmt,
    banks: VarBanks,
    store: NodeStore,
    *,
    seq_strategy: str = "fused",
) -> tuple[Bdd, WeightFn]:
    """Compile one statement; returns the relation BDD and its weights.

    ``seq_strategy`` selects how sequences eliminate the intermediate
    state: ``"naive"`` conjoins the halves fully and then quantifies all
    primed variables in one pass; ``"fused"`` (default) interleaves the
    quantification with the conjunction.  Both produce identical BDDs.
    """
    if seq_strategy not in SEQ_STRATEGIES:
        raise ValueError(f"seq_strategy must be one of {SEQ_STRATEGIES}")
    shift = banks.seq_shift()
    unshift = banks.seq_unshift()
    primed = banks.primed_set()
    frame_pairs = {banks.unprimed[x]: banks.primed[x] for x in banks.unprimed}

    def frame_without(name: str) -> dict[int, int]:
        pairs = dict(frame_pairs)
        del pairs[banks.unprimed[name]]
        return pairs

    def merge(
        w1: dict[int, tuple[Fraction, Fraction]],
        w2: dict[int, tuple[Fraction, Fraction]],
    ) -> dict[int, tuple[Fraction, Fraction]]:
        for var, w in w2.items():
            if var in w1 and w1[var] != w:
                raise ValueError(f"conflicting weights for flip variable {var}")
        w1.update(w2)
        return w1

    def rec(s: Stmt) -> tuple[Bdd, dict[int, tuple[Fraction, Fraction]]]:
        if isinstance(s, Skip):
            return store.iff_cube(frame_pairs), {}
        if isinstance(s, Flip):
            # (x' <=> f) joins the frame pairs: f sits just before x's
            # triple, so the whole formula is still one iff_cube
            f = banks.flip_var[s.label]
            pairs = frame_without(s.target)
            pairs[f] = banks.primed[s.target]
            return store.iff_cube(pairs), {f: (s.theta, 1 - s.theta)}
        if isinstance(s, Assign):
            target = banks.primed[s.target]
            if isinstance(s.rhs, Const):
                phi = store.iff_cube(
                    frame_without(s.target), {target: s.rhs.value}
                )
            else:
                phi = store.apply(
                    "iff", store.var(target), compile_expr(s.rhs, banks, store)
                ) & store.iff_cube(frame_without(s.target))
            return phi, {}
        if isinstance(s, Observe):
            return (
                compile_expr(s.cond, banks, store) & store.iff_cube(frame_pairs),
                {},
            )
        if isinstance(s, If):
            cond = compile_expr(s.cond, banks, store)
            phi1, w1 = rec(s.then_branch)
            phi2, w2 = rec(s.else_branch)
            return store.ite(cond, phi1, phi2), merge(w1, w2)
        if isinstance(s, Seq):
            if seq_strategy == "fused":
                # composition is associative, so fold the whole sequence
                # spine left-to-right: each step then renames only the
                # small right-hand relation, not an accumulated one
                atoms = _seq_spine(s)
                phi, weights = rec(atoms[0])
                for atom in atoms[1:]:
                    phi2, w2 = rec(atom)
                    phi = store.rename(
                        unshift,
                        store.and_exists(phi, store.rename(shift, phi2), primed),
                    )
                    weights = merge(weights, w2)
                return phi, weights
            phi1, w1 = rec(s.first)
            phi2, w2 = rec(s.second)
            joined = store.exists(primed, phi1 & store.rename(shift, phi2))
            return store.rename(unshift, joined), merge(w1, w2)
        raise TypeError(f"not a statement: {s!r}")

    phi, weights = rec(stmt)
    return phi, WeightFn(weights)


@dataclass(frozen=True)
class CompileStats:
    node_count: int  # internal nodes of the final formula
    store_nodes: int  # total nodes ever allocated (peak; the store holds them all)
    compile_ms: float


@dataclass(frozen=True)
class CompiledProgram:
    """A program's relation BDD, weights, and variable bookkeeping."""

    phi: Bdd
    weights: WeightFn
    banks: VarBanks
    program: Program
    stats: CompileStats

    @property
    def store(self) -> NodeStore:
        return self.phi.store


def compile_program(
    program: Program,
    *,
    seq_strategy: str = "fused",
    op_cache: bool = True,
) -> CompiledProgram:
    """Allocate variable banks and compile the whole program body."""
    begin = time.perf_counter()
    store, banks = allocate_banks(program, op_cache=op_cache)
    phi, weights = compile_stmt(
        program.body, banks, store, seq_strategy=seq_strategy
    )
    elapsed_ms = (time.perf_counter() - begin) * 1000.0
    stats = CompileStats(
        node_count=store.node_count(phi),
        store_nodes=len(store),
        compile_ms=elapsed_ms,
    )
    return CompiledProgram(phi, weights, banks, program, stats)
