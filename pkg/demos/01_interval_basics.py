"""Tour of the interval kernel: every result is an enclosure.

Run: python3 demos/01_interval_basics.py
"""

from turingcert.interval import (
    PI,
    Interval,
    enclose_decimal,
    pow_real,
    sin,
    sum_enclosure,
)

def pair(iv):
    return f"[{float(iv.lo)!r}, {float(iv.hi)!r}]"


print("== outward rounding ==")
a = Interval.point(0.1) + Interval.point(0.2)
print(f"0.1 + 0.2             -> {pair(a)}")
print(f"   width = {float(a.hi - a.lo):.3e}  (one ulp of slack, both sides)")

d = enclose_decimal("2.428")
print(f"decimal '2.428'       -> {pair(d)}")
print("   2.428 is not a binary64 number; the enclosure brackets it")

print()
print("== pi and transcendentals ==")
print(f"pi                    -> {pair(PI)}")
s = sin(PI / 6.0)
print(f"sin(pi/6)             -> {pair(s)}  (contains 0.5)")
big = sin(Interval.point(1e7))
print(f"sin(1e7)              -> {pair(big)}")

p = pow_real(Interval(2.0, 3.0), -1.5)
print(f"[2, 3]^(-1.5)         -> {pair(p)}")

print()
print("== certified sums ==")
xs = Interval.point([1e16, 1.0, -1e16, 1.0])
total = sum_enclosure(xs)
print(f"sum(1e16, 1, -1e16, 1) -> {pair(total)}")
print("   cancellation makes the certified error bound honest about the")
print("   conditioning: the true value 2 is inside, and the width ~1e1")
print("   reflects that float64 summation of 1e16-sized terms cannot do")
print("   better without exact accumulation")
well = sum_enclosure(Interval.point([0.1] * 1000))
print(f"sum of 1000 x 0.1      -> {pair(well)}")
print("   a well-conditioned sum stays a few ulps wide")

print()
print("== interval vectors broadcast like numpy ==")
v = Interval([1.0, 2.0, 3.0], [1.0, 2.5, 3.0])
w = v * 2.0 - 1.0
print(f"2*v - 1 lo = {w.lo}")
print(f"        hi = {w.hi}")
