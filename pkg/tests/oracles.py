"""Independent reference implementations written on bit lists."""


def bits(n, width):
    """Least significant first, padded or truncated to ``width``."""
    return [(n >> i) & 1 for i in range(width)]


def from_msb(bs):
    out = 0
    for b in bs:
        out = 2 * out + b
    return out


def interleave(a, b, width):
    """``(a_0 b_0 a_1 b_1 ...)_2`` with ``a_0`` the most significant bit."""
    seq = []
    for x, y in zip(bits(a, width), bits(b, width)):
        seq += [x, y]
    return from_msb(seq)


def append(c, value, width):
    return (c << width) | value


def reverse_low(a, width):
    return from_msb(bits(a, width))


def window(poly, xs):
    return 1 << poly.at(xs)


def concat_code(xs):
    """Two-bit code of each bit (0 -> 10, 1 -> 11), strings joined left to right."""
    out = 0
    for x in xs:
        out = (out << 2)
        for i in reversed(range(x.bit_length())):
            out = (out << 2) | (2 + ((x >> i) & 1))
    return out
