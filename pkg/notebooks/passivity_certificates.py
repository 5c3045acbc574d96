"""
Passivity of a few transfer functions
=====================================

Each verdict comes from an exact sign test on the even polynomial
Re{num(jw) conj(den(jw))}. A log-spaced frequency sweep is reported
alongside as a sanity check.
"""

from hordyn import TransferFunction, passivity_report

cases = {
    "(2s+3)/(s^2+3s+2)": TransferFunction([2, 3], [1, 3, 2]),
    "1/(s+1)": TransferFunction([1], [1, 1]),
    "1/s": TransferFunction([1], [1, 0]),
    "(2s^2+3.5s+2)/(s^3+3s^2+2s)": TransferFunction([2, 3.5, 2], [1, 3, 2, 0]),
    "(s-1)/(s^2+2s+1)": TransferFunction([1, -1], [1, 2, 1]),
}

print(f"{'g(s)':30s} stable passive strict  min Re g(jw)   agree")
for label, tf in cases.items():
    r = passivity_report(tf)
    print(f"{label:30s} {r.stable!s:6s} {r.passive!s:7s} {r.strictly_passive!s:6s} "
          f"{r.min_real_part:+.3e}  {r.certificate_agrees}")

# the pole at s = 0 makes the last built-in passive without being strictly so
