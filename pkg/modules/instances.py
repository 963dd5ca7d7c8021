"""Builtin instances, kept as instance-file text so that loading them exercises the parser."""


EXAMPLE_2_1 = """\
# Quartic in four variables on the boundary of the SOS cone: four squares.
vars: n=4
p1 = x1^2 - x4^2
p2 = x2^2 - x4^2
p3 = x3^2 - x4^2
p4 = -x1^2 - x1*x2 - x1*x3 + x1*x4 - x2*x3 + x2*x4 + x3*x4
"""

EXAMPLE_2_2 = """\
# The four-variable squares plus x_i*x5 for i < 5: eight squares in five variables.
vars: n=5
p1 = x1^2 - x4^2
p2 = x2^2 - x4^2
p3 = x3^2 - x4^2
p4 = -x1^2 - x1*x2 - x1*x3 + x1*x4 - x2*x3 + x2*x4 + x3*x4
p5 = x1*x5
p6 = x2*x5
p7 = x3*x5
p8 = x4*x5
"""

BUILTINS = {
    "example-2.1": EXAMPLE_2_1,
    "example-2.2": EXAMPLE_2_2,
}


def builtin_text(name: str) -> str:
    try:
        return BUILTINS[name]
    except KeyError as e:
        raise ValueError(f"unknown builtin {name!r}; choose one of {sorted(BUILTINS)}") from e
