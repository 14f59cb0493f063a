"""Two statements with identical conditional behavior that still differ.

``blockA`` and ``blockB`` below induce exactly the same conditional
distribution from input to output states.  But ``blockB`` reaches that
distribution through an observation, and observations act on *all*
probabilistic choices made so far -- including choices made by whatever
ran earlier in a sequence.  Prefixing both blocks with the same flip
exposes the difference, which is why sequencing renormalizes by the
downstream acceptance probability instead of just chaining conditional
distributions.
"""

from fractions import Fraction

from dippl import State, all_states, parse, parse_expr, transition, output_marginal

BLOCK_A = "if x { y ~ flip(1/4) } else { y ~ flip(1/2) }"

BLOCK_B = """
y ~ flip(1/2);
observe(x || y);
if y { y ~ flip(1/2) } else { y := false }
"""

a, b = parse(BLOCK_A), parse(BLOCK_B)

print("the two blocks define the same conditional distribution:")
for init_bits in ((False, False), (True, False)):
    init_a = State(a.vars, init_bits)
    init_b = State.from_mapping(b.vars, dict(zip(a.vars, init_bits)))
    table_a = {s.as_dict()["y"]: m for s, m in transition(a, init_a).mass.items()}
    table_b = {s.as_dict()["y"]: m for s, m in transition(b, init_b).mass.items()}
    print(f"  from x={init_bits[0]!s:5}: {table_a} == {table_b}: {table_a == table_b}")

PREFIX = "x ~ flip(1/3);\n"
seq_a = parse(PREFIX + BLOCK_A)
seq_b = parse(PREFIX + BLOCK_B)

print()
print("yet sequencing them after `x ~ flip(1/3)` differs:")
for program, label in ((seq_a, "flip; blockA"), (seq_b, "flip; blockB")):
    init = State.all_false(program.vars)
    pr_x = output_marginal(program, init, parse_expr("x"))
    print(f"  {label:13}: Pr[x] = {pr_x}")

# the observation inside blockB retroactively reweights the prefix flip:
# a third of runs set x, but half of the runs that survive did
assert output_marginal(seq_a, State.all_false(seq_a.vars), parse_expr("x")) == Fraction(1, 3)
assert output_marginal(seq_b, State.all_false(seq_b.vars), parse_expr("x")) == Fraction(1, 2)

print()
print("transition mass to {x: False, y: True}:")
init = State.all_false(seq_a.vars)
target = State.from_mapping(seq_a.vars, {"x": False, "y": True})
print("  flip; blockA:", transition(seq_a, init).prob(target))
