"""Trees of elliptic generators in Fricke groups, with the excision and
folding computations built on them."""

from .contfrac import (
    CFWord,
    cf_eval,
    cf_expand,
    descendant,
    dribble_endpoints,
    fold,
    lagrange_estimate,
    sigma,
    tau,
    v_words,
    word_machinery,
    word_properties,
)
from .errors import Lagrange3Error
from .excision import build_excision, excision_history, mcshane_partial_sum, ordering_checks, remaining_length, s_sum
from .group import FrickeTriple, build_group, fricke_complete
from .mobius import Mobius
from .scalar import Arith
from .shadows import excision_interval, overlap_certificate, shadow_chain, shadow_of
from .tree import enumerate_tree, geodesic_data

__version__ = "0.1.0"
