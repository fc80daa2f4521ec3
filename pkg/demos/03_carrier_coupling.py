"""The carrier protocol: two-scale coupling as plain membrane rules.

Run with:  python3 demos/03_carrier_coupling.py
"""

from mmsim import (
    CouplingSpec,
    EngineOptions,
    Model,
    build_configuration,
    carrier_cycle_length,
    generate_carrier_protocol,
    render_tree,
    rule_text,
    run,
)

spec = CouplingSpec(cycles=1)
rules = generate_carrier_protocol(spec)
print(f"the protocol compiles to {len(rules)} ordinary rules:")
for rule in rules:
    print(" ", rule_text(rule))
print()

# Compose a minimal unit by hand: a tissue patch with 4 payload tokens and
# an empty micro membrane.  No micro rules here, so delivery is a no-op
# and everything comes back unchanged.
config = build_configuration(
    ("skin", {}, [
        ("T", {"c": 4}, []),
        ("CU", {}, [("BMU", {}, []), ("V", {"p0": 1, "cyc": 1}, [])]),
    ]))
model = Model(config, rules)

print("phase walk of one round trip (4 payload tokens, no micro dynamics):")
trace = run(model, EngineOptions(seed=0), max_steps=50)
for step_ in trace.steps:
    fired = ", ".join(f"{a.rule}x{a.count}" if a.count > 1 else a.rule
                      for a in step_.applied) or "(halted)"
    carrier = step_.state["V"]
    phase = next(s for s in carrier if s.startswith("p"))
    print(f"  step {step_.index:2d}  phase {phase:>3}  T={step_.state['T']}  {fired}")
print()
print("final tree:")
print(render_tree(trace.final.skin))
print()
print(f"a steady-state macro-cycle takes {carrier_cycle_length()} steps;")
print("the first one pays 2 extra steps to leave the coupling membrane.")
