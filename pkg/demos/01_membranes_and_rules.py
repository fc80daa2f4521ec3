"""Building blocks: multisets, membrane trees, and the model language.

Run with:  python3 demos/01_membranes_and_rules.py
"""

from mmsim import (
    Multiset,
    build_configuration,
    find_membranes,
    parse_model,
    render_tree,
    rule_text,
    serialize_model,
    validate,
)

# Multisets are immutable counted bags of symbols; arithmetic never
# mutates, and removal past zero is an error rather than a clamp.
stock = Multiset({"c": 10, "m": 2})
print("stock:         ", stock)
print("after -3 c:    ", stock - Multiset({"c": 3}))
print("still intact:  ", stock)
print("contains c*3?  ", stock.contains(Multiset({"c": 3})))
print()

# A configuration is a labelled tree; ids are assigned in pre-order.
config = build_configuration(
    ("skin", {}, [
        ("T", {"c": 10}, []),
        ("T", {"c": 4}, []),
        ("CU", {}, [("V", {"p0": 1}, [])]),
    ]))
print(render_tree(config.skin))
print("membranes labelled T:", find_membranes(config, "T"))
print("violations:", validate(config) or "none")
print()

# The same structures parse from text; serialization is canonical, so
# models survive a parse/serialize round trip byte for byte.
model = parse_model("""
# two tissue patches and a parked carrier
[skin:
  [T: c*10]
  [T: c*4]
  [CU: [V: p0]]
]
rule leave: exo V from CU: p0 -> p1
rule visit: endo V into T: p1 -> p2
rule sip: send-in V: c -> cv if p2
""")
print(serialize_model(model), end="")
print()
for rule in model.rules:
    print("parsed:", rule_text(rule))
