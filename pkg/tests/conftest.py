import hypothesis
from hypothesis import strategies as st

from padic_heights import PadicElement

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.load_profile("default")

PRIMES = (3, 5, 7)


@st.composite
def units(draw, p=None, prec=30):
    p = p or draw(st.sampled_from(PRIMES))
    n = draw(st.integers(min_value=1, max_value=p**prec - 1).filter(lambda k: k % p))
    return PadicElement(p, 0, n, prec)


@st.composite
def elements(draw, p=None, prec=30, low=-3, high=3):
    u = draw(units(p, prec))
    v = draw(st.integers(low, high))
    return PadicElement(u.p, v, u.unit, prec)
